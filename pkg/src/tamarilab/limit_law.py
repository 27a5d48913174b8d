"""The limit variable ``Z = (X Y)^(1/4)``, ``X ~ Beta(1/3, 1/6)``,
``Y ~ Gamma(2/3, scale 1/2)``: exact moments, sampling and comparisons."""

from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import stats

from .moment_pump import SHADOW_DPS


@dataclass(frozen=True)
class LimitLawSpec:
    beta_a: Fraction = Fraction(1, 3)
    beta_b: Fraction = Fraction(1, 6)
    gamma_shape: Fraction = Fraction(2, 3)
    gamma_scale: Fraction = Fraction(1, 2)
    exponent: Fraction = Fraction(1, 4)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("beta_a", "beta_b", "gamma_shape", "gamma_scale", "exponent", "scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


UPPER = LimitLawSpec()
LOWER = LimitLawSpec(scale=Fraction(1, 3))


def _mp(q):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


def _gamma_formula_moment(k):
    """``sqrt(3) 2^(-k/4-1) / sqrt(pi) G(k/4+1/3) G(k/4+2/3) / G(k/4+1/2)``."""
    x = mpmath.mpf(k) / 4
    return (mpmath.sqrt(3) * mpmath.mpf(2) ** (-x - 1) / mpmath.sqrt(mpmath.pi)
            * mpmath.gamma(x + mpmath.mpf(1) / 3) * mpmath.gamma(x + mpmath.mpf(2) / 3)
            / mpmath.gamma(x + mpmath.mpf(1) / 2))


def _duplicated_moment(k):
    """Same moments after the duplication formula:
    ``G(k/2+1/3) G(k/2-1/3) 4^(-k) 6^(3k/4) / (sqrt(3 pi) G(3k/4-1/2))``."""
    k = mpmath.mpf(k)
    return (mpmath.gamma(k / 2 + mpmath.mpf(1) / 3) * mpmath.gamma(k / 2 - mpmath.mpf(1) / 3)
            * mpmath.mpf(4) ** (-k) * mpmath.mpf(6) ** (3 * k / 4)
            / (mpmath.sqrt(3 * mpmath.pi) * mpmath.gamma(3 * k / 4 - mpmath.mpf(1) / 2)))


def _product_moment(k, spec):
    """``E[X^j] E[Y^j]`` with ``j = k * exponent``, from the Beta and Gamma laws."""
    j = _mp(spec.exponent) * k
    a, b = _mp(spec.beta_a), _mp(spec.beta_b)
    shape, theta = _mp(spec.gamma_shape), _mp(spec.gamma_scale)
    beta_part = (mpmath.gamma(a + b) * mpmath.gamma(a + j)
                 / (mpmath.gamma(a) * mpmath.gamma(a + b + j)))
    gamma_part = theta ** j * mpmath.gamma(shape + j) / mpmath.gamma(shape)
    return beta_part * gamma_part


ROUTES = ("gamma", "duplicated", "product")


def z_moment(k, route="gamma", spec=UPPER):
    """``E[(scale Z)^k]`` as a 50-digit mpf.

    ``route`` picks the formula: ``"gamma"`` (ratio of Gamma values in
    ``k/4``), ``"duplicated"`` (its duplication-formula form) or
    ``"product"`` (Beta moment times Gamma moment).  The first two are
    specific to the default parameters.
    """
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}")
    with mpmath.workdps(SHADOW_DPS):
        if route == "product":
            value = _product_moment(k, spec)
        else:
            default = LimitLawSpec(scale=spec.scale)
            if spec != default:
                raise ValueError(f"route {route!r} only covers the default parameters")
            value = _gamma_formula_moment(k) if route == "gamma" else _duplicated_moment(k)
        return value * _mp(spec.scale) ** k


def sample_z(rng, n_samples, scale=1, spec=UPPER):
    """I.i.d. draws of ``scale * (X Y)^(1/4)``.

    ``X`` is built as ``G1 / (G1 + G2)`` from two standard Gamma draws, and
    all Gamma draws come from numpy's generator, whose shape-below-one
    branch is a rejection sampler.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    g1 = rng.standard_gamma(float(spec.beta_a), n_samples)
    g2 = rng.standard_gamma(float(spec.beta_b), n_samples)
    x = g1 / (g1 + g2)
    y = rng.standard_gamma(float(spec.gamma_shape), n_samples) * float(spec.gamma_scale)
    return float(scale) * (x * y) ** float(spec.exponent)


def _bootstrap_ci(per_unit, rng, n_boot, level):
    n = per_unit.shape[0]
    idx = rng.integers(0, n, size=(n_boot, n))
    means = per_unit[idx].mean(axis=1)
    lo, hi = np.quantile(means, [(1 - level) / 2, (1 + level) / 2], axis=0)
    return lo, hi


def compare_empirical(samples, reference, k_max=4, rng=None, n_boot=1000, level=0.95):
    """Compare samples with another sample or with exact moments.

    ``samples`` is either a 1-D array of values or a 2-D array whose row
    ``i`` holds per-unit estimates of the moments ``0..k_max`` (used when
    one sampled structure contributes many correlated values).  ``reference``
    is a 1-D sample array (adds a two-sample KS test) or a sequence of
    exact moments indexed by ``k``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("empty sample")
    report = {"n_samples": int(samples.shape[0])}
    if samples.ndim == 1:
        per_unit = np.stack([samples ** k for k in range(k_max + 1)], axis=1)
    else:
        per_unit = samples[:, :k_max + 1]
    empirical = per_unit.mean(axis=0)
    if isinstance(reference, np.ndarray) and reference.ndim == 1 and len(reference) > k_max + 1:
        if samples.ndim != 1:
            raise ValueError("a KS test needs raw values, not moment rows")
        res = stats.ks_2samp(samples, reference)
        report["ks_statistic"] = float(res.statistic)
        report["ks_pvalue"] = float(res.pvalue)
        ref = np.array([np.mean(reference ** k) for k in range(k_max + 1)])
    else:
        ref = np.array([float(reference[k]) for k in range(k_max + 1)])
    lo, hi = _bootstrap_ci(per_unit, rng, n_boot, level)
    report["moments"] = [
        {"k": k, "empirical": float(empirical[k]), "reference": float(ref[k]),
         "relative_gap": float(empirical[k] / ref[k] - 1),
         "ci_low": float(lo[k]), "ci_high": float(hi[k])}
        for k in range(1, k_max + 1)
    ]
    return report
