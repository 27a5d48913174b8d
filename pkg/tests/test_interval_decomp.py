import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tamarilab.interval_decomp import (DecompStep, all_steps, build_counts, compose, decompose,
                                       sample_batch, sample_from_uniforms, sample_uniform,
                                       scaled_tables, chi_square_uniform, height_profile_moments)
from tamarilab.interval_decomp.counts import RHO, contact_ratio
from tamarilab.interval_decomp import sampler
from tamarilab.tamari_core import (DyckPath, PathError, TamariInterval, all_intervals,
                                   census_contacts, interval_count_formula, is_tamari_leq)


def test_recurrence_and_closed_rows_agree():
    assert build_counts(30, "recurrence").rows == build_counts(30, "closed").rows


def test_rows_match_oracle():
    table = build_counts(8)
    for n in range(9):
        census = census_contacts(n)
        assert {k: c for k, c in enumerate(table[n]) if c} == census
    assert table.check_formula() == []


def test_contact_ratio_structure():
    # second contact count is the number of intervals one size down
    table = build_counts(12, "closed")
    for n in range(1, 13):
        assert table.get(n, 1) == 0
        assert table.get(n, 2) == interval_count_formula(n - 1)
    assert contact_ratio(3, 2) * table.get(3, 2) == table.get(3, 3)


def test_csv_export():
    buf = io.StringIO()
    build_counts(5).to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,contacts,count,row_sum,closed_form_total"
    assert lines[1] == "0,1,1,1,1"
    assert all(line.endswith(",399,399") for line in lines if line.startswith("5,"))


def test_scaled_tables_match_exact():
    table, tails = scaled_tables(40, contact_cap=64)
    exact = build_counts(40, "closed")
    for n in range(41):
        for k, c in enumerate(exact[n]):
            assert table[n, k] == pytest.approx(float(c * RHO ** n), rel=1e-10, abs=0)
    assert tails[10, 2] == pytest.approx(table[10, 2:].sum(), rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_decompose_compose_round_trip(n):
    for iv in all_intervals(n):
        step = decompose(iv)
        assert step.size == n
        assert compose(step) == iv


@pytest.mark.parametrize("n", range(0, 7))
def test_compose_is_a_bijection(n):
    by_size = {k: sorted(all_intervals(k)) for k in range(n + 1)}
    built = [compose(s) for s in all_steps(by_size, n)]
    assert len(built) == len(set(built)) == interval_count_formula(n + 1)
    assert set(built) == all_intervals(n + 1)


def test_bad_mark_rejected():
    iv = TamariInterval(DyckPath("UD"), DyckPath("UD"))
    with pytest.raises(PathError):
        DecompStep(iv, 3, iv)


def test_compiled_and_python_samplers_agree():
    rng = np.random.default_rng(3)
    for n in (1, 2, 7, 40, 333):
        u = rng.random(2 * n + 1)
        a = sample_from_uniforms(n, u)
        b = sample_from_uniforms(n, u, compiled=False)
        assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)


def test_uniform_budget_is_checked():
    with pytest.raises(sampler.SamplerError):
        sample_from_uniforms(5, np.zeros(10))


@pytest.mark.parametrize("mode", ["exact", "log-float"])
def test_uniformity_small(mode):
    rng = np.random.default_rng(11)
    n = 4
    tally = {iv: 0 for iv in all_intervals(n)}
    for _ in range(13_600):
        tally[sample_uniform(n, rng, mode).to_interval()] += 1
    _, pvalue = chi_square_uniform(tally)
    assert pvalue > 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_samples_are_intervals(n, seed):
    rng = np.random.default_rng(seed)
    for mode in ("exact", "log-float"):
        iv = sample_uniform(n, rng, mode).to_interval()
        assert is_tamari_leq(iv.lower, iv.upper)


@settings(max_examples=10, deadline=None)
@given(st.integers(50, 3000), st.integers(0, 2**32 - 1))
def test_large_samples_are_valid_paths(n, seed):
    s = sample_uniform(n, np.random.default_rng(seed))
    for steps in (s.lower, s.upper):
        DyckPath(steps.tobytes())
    # the lower path never rises above the upper one
    lower = np.cumsum(np.where(s.lower == 1, 1, -1))
    upper = np.cumsum(np.where(s.upper == 1, 1, -1))
    assert (lower <= upper).all()


def test_exact_mode_big_sizes_and_cap():
    s = sample_uniform(150, np.random.default_rng(1), "exact")
    assert s.size == 150
    with pytest.raises(sampler.SamplerError):
        sample_uniform(sampler.EXACT_CAP + 1, np.random.default_rng(1), "exact")


def test_batch_reproducible_and_independent_of_batching():
    a = sample_batch(30, 5, seed=9)
    b = sample_batch(30, 5, seed=9)
    assert all(np.array_equal(x.lower, y.lower) for x, y in zip(a, b))
    many = sample_batch(30, 8, seed=9)
    assert all(np.array_equal(x.upper, y.upper) for x, y in zip(a, many[:5]))


def test_contact_law_of_samples():
    rng = np.random.default_rng(2)
    n = 30
    table = build_counts(n, "closed")
    counts = Counter(sampler.contact_count(sample_uniform(n, rng).lower) for _ in range(4000))
    row = table[n]
    total = sum(row)
    expected_two = 4000 * row[2] / total
    assert abs(counts[2] - expected_two) < 5 * np.sqrt(expected_two)


def test_height_profile_moments():
    s = sample_uniform(3, np.random.default_rng(0))
    lo, up = height_profile_moments([s], 2)
    heights = np.concatenate([[0], np.cumsum(np.where(s.upper == 1, 1, -1))])
    assert up[0, 0] == 7
    assert up[0, 2] == pytest.approx((heights ** 2).sum())
