from fractions import Fraction

import pytest

from tamarilab import gf_engine
from tamarilab.exactnum import MultiPoly
from tamarilab.tamari_core import interval_count_formula


@pytest.mark.parametrize("tag", ["F", "H", "G", "M"])
def test_iteration_matches_census(tag):
    assert gf_engine.compare_with_census(tag, 7) == []


def test_contact_series_first_terms():
    F = gf_engine.iterate_F(3)
    x = MultiPoly.var("x")
    assert F[0] == x
    assert F[1] == x ** 2
    assert F[2] == x ** 2 + 2 * x ** 3
    assert F.totals() == [interval_count_formula(n) for n in range(4)]


def test_marked_totals_count_abscissas():
    H = gf_engine.iterate_H(6)
    G = gf_engine.iterate_G(6)
    M = gf_engine.iterate_M(6)
    a = [interval_count_formula(n) for n in range(7)]
    assert H.totals() == [(2 * n + 1) * a[n] for n in range(7)]
    assert G.totals() == [(2 * n + 1) * a[n] for n in range(7)]
    assert M.totals() == [n * a[n] for n in range(7)]


def test_mixed_second_coefficient():
    M = gf_engine.iterate_M(2)
    w = MultiPoly.var("w", laurent=True)
    assert M.at_ones(2, keep=("w",)) == 4 + w + w.inverse() ** 2


@pytest.mark.parametrize("tag", ["H", "G", "M"])
def test_jet_agrees_with_full_derivatives(tag):
    full = gf_engine.ITERATORS[tag](7)
    jet = gf_engine.ITERATORS[tag](7, jet=3)
    for k in range(4):
        assert gf_engine.factorial_moment_values(full, k) == gf_engine.factorial_moment_values(jet, k)


def test_jet_refuses_higher_moment():
    H = gf_engine.iterate_H(3, jet=1)
    with pytest.raises(ValueError):
        gf_engine.factorial_moment_values(H, 2)


def test_mean_moments_small_case():
    # n=1: one interval, abscissas 0,1,2 with upper heights 0,1,0
    H = gf_engine.iterate_H(1)
    means = gf_engine.mean_factorial_moments(H, 1, [1, 1])
    assert means[1] == Fraction(1, 3)


def test_normalized_series():
    H = gf_engine.iterate_H(4)
    s = gf_engine.factorial_moment_series(H, 0, normalize=True)
    assert [s[n].constant_value() for n in range(5)] == [interval_count_formula(n) for n in range(5)]


def test_json_round_trip():
    M = gf_engine.iterate_M(4)
    back = gf_engine.GFArray.from_json(M.to_json())
    assert back.tag == "M" and back.vars == M.vars
    assert all(a == b for a, b in zip(back.coeffs, M.coeffs))


def test_cache_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(gf_engine.CACHE_ENV, str(tmp_path))
    first = gf_engine.load_or_iterate("H", 5, jet=2)
    assert (tmp_path / "H_jet2_5.json").exists()
    again = gf_engine.load_or_iterate("H", 3, jet=2)
    assert all(a == b for a, b in zip(again.coeffs, first.coeffs[:4]))
