"""The thirteen acceptance criteria, one test each.

Every test prints a ``criterion N: PASS/FAIL`` line and the summary hook in
``conftest.py`` repeats them at the end of the run.  Run directly with
``python3 tests/test_acceptance.py`` to get only these lines.
"""

import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from acceptance_log import record
from tamarilab import closed_form, gf_engine, limit_law, moment_pump
from tamarilab.cli import mixed_second_moments
from tamarilab.interval_decomp import build_counts, sample_batch, height_profile_moments
from tamarilab.interval_decomp import sampler
from tamarilab.tamari_core import (all_dyck_paths, all_intervals, count_intervals,
                                   coupling_gaps, coupling_outcomes, interval_count_formula,
                                   is_tamari_leq, upstep_height)

DIGITS = 30


def _agree_all(a, b):
    return all(moment_pump.agree(x, y, DIGITS) for x, y in zip(a, b))


def test_criterion_01_counts():
    start = time.time()
    brute = [count_intervals(n) for n in range(9)]
    rows = build_counts(10).row_sums()
    formula = [interval_count_formula(n) for n in range(11)]
    elapsed = time.time() - start
    ok = (brute == formula[:9] and rows == formula and formula[:6] == [1, 1, 3, 13, 68, 399]
          and elapsed < 60)
    record(1, ok, f"closure n<=8, recurrence n<=10 and formula agree; {elapsed:.1f}s")
    assert ok


def test_criterion_02_gf_oracles():
    bad = {tag: gf_engine.compare_with_census(tag, 8) for tag in ("G", "H", "M")}
    ok = not any(bad.values())
    record(2, ok, f"G, H, M against lattice census n<=8; mismatching sizes {bad}")
    assert ok


def test_criterion_03_closed_forms():
    reports = [closed_form.verify_F(20), closed_form.verify_H(12),
               closed_form.verify_G_annihilator(20), closed_form.verify_M(15)]
    ok = all(r.passed for r in reports)
    detail = ", ".join(f"{r['check']}@{r['order']}={'ok' if r.passed else r['discrepancy']}"
                       for r in reports)
    record(3, ok, detail + f"; root germ {reports[3].get('germ')}")
    assert ok


def test_criterion_04_dyck_pump():
    limits = moment_pump.limit_moments(moment_pump.dyck_instance(), 10)
    with mpmath.workdps(moment_pump.SHADOW_DPS):
        expected = [mpmath.gamma(mpmath.mpf(k) / 2 + 1) for k in range(11)]
    ok = _agree_all(limits, expected)
    record(4, ok, "Dyck limit moments equal Gamma(k/2+1), k<=10, 30 digits")
    assert ok


def test_criterion_05_upper_pump():
    spec = moment_pump.upper_instance()
    cs = moment_pump.pump(spec, 12)
    limits = moment_pump.limit_moments(spec, 12, cs)
    gamma_form = [limit_law.z_moment(k, "gamma") for k in range(13)]
    duplicated = [limit_law.z_moment(k, "duplicated") for k in range(13)]
    ok = (_agree_all(limits, gamma_form) and _agree_all(gamma_form, duplicated)
          and cs[2] == Fraction(8, 27))
    record(5, ok, f"upper limit moments k<=12 match the Gamma formula and its duplicated form; c_2 = {cs[2]}")
    assert ok


def test_criterion_06_lower_pump():
    upper = moment_pump.limit_moments(moment_pump.upper_instance(), 12)
    lower = moment_pump.limit_moments(moment_pump.lower_instance(), 12)
    with mpmath.workdps(moment_pump.SHADOW_DPS):
        scaled = [upper[k] / mpmath.mpf(3) ** k for k in range(13)]
    ok = _agree_all(lower, scaled)
    record(6, ok, "lower limit moments = 3^-k upper, k<=12, 30 digits")
    assert ok


def test_criterion_07_law_identity():
    pumped = moment_pump.limit_moments(moment_pump.upper_instance(), 12)
    law = [limit_law.z_moment(k, "product") for k in range(13)]
    ok = _agree_all(pumped, law)
    record(7, ok, "Beta-Gamma moments of Z equal pumped upper moments, k<=12, 30 digits")
    assert ok


def test_criterion_08_transfer():
    start = time.time()
    spec = moment_pump.upper_instance()
    n = 200
    exact = (2 * n + 1) * interval_count_formula(n)
    pred = moment_pump.predict_finite_n(spec, 0, n)
    rel = abs(float(pred / exact) - 1)
    ratio = Fraction(interval_count_formula(501), interval_count_formula(500))
    ratio_gap = abs(float(ratio / Fraction(256, 27)) - 1)
    elapsed = time.time() - start
    ok = rel < 0.02 and ratio_gap < 0.02 and elapsed < 60
    record(8, ok, f"k=0 prediction off by {rel:.4%} at n=200; a_501/a_500 off by {ratio_gap:.4%}")
    assert ok


def test_criterion_09_finite_trend():
    H = gf_engine.iterate_H(80, jet=1)
    counts = [interval_count_formula(n) for n in range(81)]
    means = gf_engine.mean_factorial_moments(H, 1, counts)
    target = float(limit_law.z_moment(1))
    scaled = [float(means[n]) / n ** 0.75 for n in range(20, 81)]
    gaps = [abs(s - target) for s in scaled]
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    final = gaps[-1] / target
    ok = monotone and final < 0.15
    record(9, ok, f"E[Q_n]/n^(3/4) moves monotonically toward {target:.6f}; "
                  f"{scaled[-1]:.6f} at n=80 ({final:.2%} off)")
    assert ok


def test_criterion_10_sampler_uniformity():
    start = time.time()
    rng = np.random.default_rng(7)
    n = 5
    tally = {iv: 0 for iv in all_intervals(n)}
    for _ in range(79800):
        tally[sampler.sample_uniform(n, rng, "exact").to_interval()] += 1
    stat, pvalue = sampler.chi_square_uniform(tally)
    valid = True
    for size in range(1, 9):
        for _ in range(200):
            iv = sampler.sample_uniform(size, rng, "exact").to_interval()
            valid &= is_tamari_leq(iv.lower, iv.upper)
    elapsed = time.time() - start
    ok = len(tally) == 399 and pvalue > 1e-3 and valid and elapsed < 120
    record(10, ok, f"chi-square {stat:.1f} on 398 dof, p = {pvalue:.3f}; "
                   f"oracle relation holds for sampled n<=8: {valid}; {elapsed:.0f}s")
    assert ok


def test_criterion_11_monte_carlo():
    n = 4096
    samples = sample_batch(n, 10_000, seed=11, weight_mode="log-float")
    lower, upper = height_profile_moments(samples, 2)
    norm = np.array([1.0 / (2 * n + 1) / n ** (0.75 * k) for k in range(3)])
    ref_up = [float(limit_law.z_moment(k)) for k in range(3)]
    ref_lo = [float(limit_law.z_moment(k, spec=limit_law.LOWER)) for k in range(3)]
    rep_up = limit_law.compare_empirical(upper * norm, ref_up, k_max=2)
    rep_lo = limit_law.compare_empirical(lower * norm, ref_lo, k_max=2)
    gaps = [m["relative_gap"] for m in rep_up["moments"] + rep_lo["moments"]]
    ok = all(abs(g) < 0.10 for g in gaps)
    record(11, ok, "relative moment gaps (upper k=1,2, lower k=1,2): "
                   + ", ".join(f"{g:+.3f}" for g in gaps))
    assert ok


def test_criterion_12_mixed():
    moments = mixed_second_moments(60)
    second = {n: m2 for n, (_, m2) in moments.items()}
    ratios = {n: second[n] / n for n in range(10, 61)}
    bounded = max(ratios.values()) < 2 * ratios[60]
    ok = second[2] == Fraction(5, 6) and bounded
    record(12, ok, f"n=2 value {second[2]}; max ratio over 10..60 "
                   f"{float(max(ratios.values())):.4f} vs 2 x {float(ratios[60]):.4f}")
    assert ok


def test_criterion_13_coupling():
    exhaustive = True
    for n in range(1, 7):
        for path in all_dyck_paths(n):
            for i, j in coupling_outcomes(path):
                exhaustive &= abs(path.heights()[i] - upstep_height(path, j)) <= 1
    rng = np.random.default_rng(13)
    worst = 0
    for s in sample_batch(1000, 50, seed=13):
        iv = s.to_interval()
        for path in (iv.lower, iv.upper):
            worst = max(worst, int(coupling_gaps(path, rng, 1000).max()))
    ok = exhaustive and worst <= 1
    record(13, ok, f"exhaustive n<=6: {exhaustive}; max gap over 10^5 draws at n=1000: {worst}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
