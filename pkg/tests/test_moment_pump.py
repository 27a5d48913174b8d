from fractions import Fraction
from math import factorial

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from tamarilab import moment_pump as mp
from tamarilab.moment_pump import PumpSpec, SymReal, parse_symreal
from tamarilab.tamari_core import catalan, interval_count_formula

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)
symreals = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), fractions,
                           max_size=4).map(SymReal)


@settings(max_examples=60, deadline=None)
@given(symreals, symreals, symreals)
def test_field_axioms(a, b, c):
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    with mpmath.workdps(60):
        assert mp.agree((a * b).to_mpf(), a.to_mpf() * b.to_mpf(), 40) or (a * b).is_zero()


@settings(max_examples=40, deadline=None)
@given(symreals)
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == SymReal.rational(1)


def test_parse_symreal():
    assert parse_symreal("sqrt(6)") * parse_symreal("sqrt(6)") == 6
    assert parse_symreal("2^(1/4)") ** 4 == 2
    assert parse_symreal("6^(3/4)") == parse_symreal("2^(3/4)*3^(3/4)")
    assert parse_symreal("(3*k-4)/2", k=Fraction(2)) == 1
    assert str(parse_symreal("-32*sqrt(6)/27")) == "-32*sqrt(6)/27"
    with pytest.raises(ValueError):
        parse_symreal("5^(1/4)")
    with pytest.raises(ValueError):
        parse_symreal("__import__('os')")


def test_symreal_shadow_precision():
    x = parse_symreal("16/27*3^(3/4)*2^(1/4)")
    with mpmath.workdps(60):
        ref = mpmath.mpf(16) / 27 * mpmath.mpf(3) ** 0.75 * mpmath.root(2, 4)
        ref = mpmath.mpf(16) / 27 * mpmath.root(27, 4) * mpmath.root(2, 4)
        assert mp.agree(x.to_mpf(), ref, 45)


def test_dyck_constants():
    cs = mp.pump(mp.dyck_instance(), 12)
    assert cs == [SymReal.rational(Fraction(2 * factorial(k), 2 ** k)) for k in range(13)]


def test_upper_constants_match_closed_form():
    cs = mp.pump(mp.upper_instance(), 20)
    assert cs[2] == Fraction(8, 27)
    assert cs[8] == parse_symreal("700*sqrt(6)/243")
    assert all(cs[k] == mp.upper_constant_closed(k) for k in range(21))


def test_lower_constants_scale():
    up = mp.pump(mp.upper_instance(), 14)
    lo = mp.pump(mp.lower_instance(), 14)
    assert all(lo[k] == up[k] * Fraction(1, 3 ** k) for k in range(15))


def test_initial_count_is_checked():
    with pytest.raises(ValueError):
        PumpSpec("bad", 2, Fraction(-1, 2), Fraction(1, 2), Fraction(1, 4), {2: "k"}, ["2"])
    assert mp.upper_instance().last_initial == 6
    assert mp.lower_instance().last_initial == 9
    assert mp.dyck_instance().last_initial == 1


def test_suboptimal_scaling_kills_moments():
    spec = mp.dyck_instance().with_beta(Fraction(3, 4))
    assert spec.coefficients == {}
    cs = mp.pump(spec, 8)
    assert cs[0] == 2 and all(c.is_zero() for c in cs[1:])
    limits = mp.limit_moments(spec, 8, cs)
    assert limits[0] == 1 and all(v == 0 for v in limits[1:])
    with pytest.raises(ValueError):
        mp.dyck_instance().with_beta(Fraction(1, 4))


def test_natural_exponents():
    assert mp.dyck_instance().natural_beta() == Fraction(1, 2)
    assert mp.upper_instance().natural_beta() == Fraction(3, 4)
    assert mp.lower_instance().natural_beta() == Fraction(3, 4)


def test_spec_json_round_trip():
    spec = mp.lower_instance()
    back = PumpSpec.from_json(spec.to_json())
    assert mp.pump(back, 14) == mp.pump(spec, 14)


def test_stirling_relation():
    # Poisson(1) has every factorial moment 1 and raw moments the Bell numbers
    assert mp.raw_from_factorial([1] * 6) == [1, 1, 2, 5, 15, 52]


def test_raw_and_factorial_limits_coincide():
    limits = mp.limit_moments(mp.upper_instance(), 4)
    raw = mp.scaled_raw_limit(limits, 0.75, 10 ** 20)
    assert all(mp.agree(a, b, 12) for a, b in zip(raw, limits))


def test_dyck_finite_series():
    assert mp.dyck_moment_series(0, 6) == [(2 * n + 1) * catalan(n) for n in range(7)]
    # n=1: heights 0,1,0 -> sum of h is 1
    assert mp.dyck_moment_series(1, 3)[1] == 1


def test_dyck_transfer_prediction():
    # the relative error carries an n^(-1/2) correction, so it halves when n quadruples
    spec = mp.dyck_instance()
    series = mp.dyck_moment_series(1, 1600)
    errs = [float(mp.predict_finite_n(spec, 1, n) / series[n]) - 1 for n in (100, 400, 1600)]
    assert 0 < errs[2] < errs[1] < errs[0] < 0.2
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(2, rel=0.1)


def test_count_prediction_sign_and_accuracy():
    spec = mp.upper_instance()
    pred = mp.predict_finite_n(spec, 0, 300)
    assert pred > 0
    assert float(pred / (601 * interval_count_formula(300))) == pytest.approx(1, rel=0.01)
