import mpmath
import numpy as np
import pytest

from tamarilab import limit_law as ll
from tamarilab.moment_pump import agree


def test_zero_moment():
    for route in ll.ROUTES:
        assert agree(ll.z_moment(0, route), 1)


def test_fourth_moment_routes():
    with mpmath.workdps(50):
        g = mpmath.gamma
        third = mpmath.mpf(1) / 3
        expected = (g(mpmath.mpf(1) / 2) * g(1 + third) / (g(third) * g(mpmath.mpf(3) / 2))
                    * (mpmath.mpf(1) / 2) * g(1 + 2 * third) / g(2 * third))
    assert agree(ll.z_moment(4, "product"), expected)
    assert agree(ll.z_moment(4, "gamma"), expected)


@pytest.mark.parametrize("k", range(0, 21))
def test_routes_agree(k):
    a = ll.z_moment(k, "gamma")
    assert agree(a, ll.z_moment(k, "duplicated"))
    assert agree(a, ll.z_moment(k, "product"))


def test_scale_law():
    for k in range(8):
        with mpmath.workdps(50):
            assert agree(ll.z_moment(k, spec=ll.LOWER), ll.z_moment(k) / mpmath.mpf(3) ** k)


def test_bad_inputs():
    with pytest.raises(ValueError):
        ll.z_moment(-1)
    with pytest.raises(ValueError):
        ll.z_moment(2, "gamma", spec=ll.LimitLawSpec(beta_a=1))
    with pytest.raises(ValueError):
        ll.LimitLawSpec(gamma_shape=0)
    with pytest.raises(ValueError):
        ll.sample_z(np.random.default_rng(0), 0)


def test_sampler_moments():
    rng = np.random.default_rng(8)
    z = ll.sample_z(rng, 10 ** 6)
    se = z.std() / np.sqrt(len(z))
    assert abs(z.mean() - float(ll.z_moment(1))) < 3 * se
    z4 = z ** 4
    assert abs(z4.mean() - float(ll.z_moment(4))) < 3 * z4.std() / np.sqrt(len(z))


def test_scaled_samples():
    a = ll.sample_z(np.random.default_rng(1), 1000)
    b = ll.sample_z(np.random.default_rng(1), 1000, scale=1 / 3)
    assert np.allclose(b, a / 3)


def test_compare_same_law():
    rng = np.random.default_rng(4)
    rep = ll.compare_empirical(ll.sample_z(rng, 4000), ll.sample_z(rng, 4000), rng=rng)
    assert rep["ks_pvalue"] > 0.001
    assert len(rep["moments"]) == 4


def test_compare_against_exact_moments():
    rng = np.random.default_rng(5)
    z = ll.sample_z(rng, 200_000)
    ref = [float(ll.z_moment(k)) for k in range(5)]
    rep = ll.compare_empirical(z, ref, rng=rng, n_boot=200)
    for m in rep["moments"]:
        assert abs(m["relative_gap"]) < 0.02
        assert m["ci_low"] <= m["empirical"] <= m["ci_high"]


def test_compare_rejects_empty():
    with pytest.raises(ValueError):
        ll.compare_empirical(np.array([]), [1, 1, 1, 1, 1])
