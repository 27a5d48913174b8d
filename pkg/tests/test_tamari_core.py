from collections import Counter

import numpy as np
import pytest
from scipy import stats

from tamarilab.tamari_core import (DyckPath, PathError, TamariInterval, TamariOracle,
                                   all_dyck_paths, catalan, couple_abscissa, coupling_gaps,
                                   coupling_outcomes, count_intervals, covering_successors,
                                   height_at, interval_count_formula, is_tamari_leq,
                                   random_dyck_path, upstep_height)


def test_path_parsing_and_statistics():
    p = DyckPath("UUDDUD")
    assert p.heights() == (0, 1, 2, 1, 0, 1, 0)
    assert p.contacts() == [0, 4, 6]
    assert p.contact_count() == 3
    assert p.upstep_starts() == [0, 1, 4]
    assert p.matching_down(0) == 3
    assert height_at(p, 2) == 2
    assert upstep_height(p, 2) == 1
    assert DyckPath("()") == DyckPath("UD")


@pytest.mark.parametrize("bad", ["DU", "UUD", "UXD"])
def test_invalid_paths(bad):
    with pytest.raises(PathError):
        DyckPath(bad)


def test_catalan_enumeration():
    assert [len(all_dyck_paths(n)) for n in range(8)] == [catalan(n) for n in range(8)]


def test_size_three_hasse_diagram():
    orc = TamariOracle(3)
    assert len(orc.paths) == 5
    # the pentagon: five covering edges and 13 intervals
    assert orc.edge_count() == 5
    assert orc.count() == 13


def test_covering_move_example():
    # UD followed by UD: the first down step jumps over the next excursion
    assert covering_successors(DyckPath("UDUD")) == {DyckPath("UUDD")}
    assert covering_successors(DyckPath("UUDD")) == set()


def test_counts_match_formula():
    assert [count_intervals(n) for n in range(9)] == [interval_count_formula(n) for n in range(9)]
    assert [interval_count_formula(n) for n in range(6)] == [1, 1, 3, 13, 68, 399]


def test_order_is_reflexive_and_antisymmetric():
    paths = all_dyck_paths(4)
    for p in paths:
        assert is_tamari_leq(p, p)
    for p in paths:
        for q in paths:
            if p != q and is_tamari_leq(p, q):
                assert not is_tamari_leq(q, p)


def test_brute_force_cap():
    with pytest.raises(ValueError):
        TamariOracle(11)


def test_interval_requires_equal_sizes():
    with pytest.raises(PathError):
        TamariInterval(DyckPath("UD"), DyckPath("UUDD"))


@pytest.mark.parametrize("n", range(1, 7))
def test_coupling_bound_exhaustive(n):
    for path in all_dyck_paths(n):
        outcomes = coupling_outcomes(path)
        assert len(outcomes) == 2 * n
        assert sorted(i for i, _ in outcomes) == list(range(2 * n))
        for i, j in outcomes:
            assert abs(path.heights()[i] - upstep_height(path, j)) <= 1


def test_coupled_abscissa_is_uniform():
    rng = np.random.default_rng(3)
    path = DyckPath("UUDUDDUUUDDD")
    draws = Counter(couple_abscissa(path, rng)[0] for _ in range(100_000))
    observed = [draws[i] for i in range(len(path.steps))]
    assert stats.chisquare(observed).pvalue > 1e-3


def test_vectorized_coupling_matches_bound():
    rng = np.random.default_rng(4)
    path = random_dyck_path(300, rng)
    gaps = coupling_gaps(path, rng, 20_000)
    assert gaps.max() <= 1
    assert set(np.unique(gaps)) == {0, 1}


def test_random_dyck_path_uniform():
    rng = np.random.default_rng(5)
    tally = Counter(str(random_dyck_path(4, rng)) for _ in range(14_000))
    assert len(tally) == catalan(4)
    assert stats.chisquare(list(tally.values())).pvalue > 1e-3
