"""Uniform random Tamari intervals by recursive decomposition.

A node of size ``n+1`` with ``c`` lower contacts chooses the size ``a`` of
its first piece, the number ``m`` of contacts kept from it and the contact
count ``k1 >= m`` of the first piece; the mark is ``k1 - m + 1``.  Weights
come either from exact integer tables or from float tables scaled by
``rho**n`` so that large sizes stay in range.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..tamari_core import DyckPath, TamariInterval
from . import _fastsample
from .counts import RHO, build_counts, scaled_tables

EXACT_CAP = 2000
FLOAT_CONTACT_CAP = 256
WEIGHT_MODES = ("exact", "log-float")


class SamplerError(ValueError):
    pass


def boustrophedon(n):
    """``0, n, 1, n-1, ...``: small pieces on either side are tried first."""
    for step in range(n + 1):
        yield step // 2 if step % 2 == 0 else n - step // 2


_TABLES = {}


def _exact_table(n):
    # one table, rebuilt only when a larger size is requested
    size = max(64, n)
    have = _TABLES.get("exact")
    if have is None or have.n_max < size:
        _TABLES["exact"] = build_counts(size, method="closed")
    return _TABLES["exact"]


def _float_tables(n):
    size = -(-max(n, 1) // 4096) * 4096
    have = _TABLES.get("float")
    if have is None or have[0].shape[0] <= size:
        _TABLES["float"] = scaled_tables(size, FLOAT_CONTACT_CAP)
    return _TABLES["float"]


def _draw_tree_exact(N, table, rng):
    rows = table.rows
    tails = table.tails()
    n_nodes = 2 * N + 1
    size = [0] * n_nodes
    marks = [0] * n_nodes
    child1 = [-1] * n_nodes
    child2 = [-1] * n_nodes
    contacts = [0] * n_nodes

    def pick(total):
        return int(rng.integers(0, total)) if total < 2**63 else _big_randbelow(rng, total)

    root = rows[N]
    target = pick(sum(root))
    for c, w in enumerate(root):
        if target < w:
            break
        target -= w
    size[0], contacts[0] = N, c
    count = 1
    stack = [0]
    while stack:
        node = stack.pop()
        s = size[node]
        if s == 0:
            continue
        c = contacts[node]
        n = s - 1
        target = pick(rows[s][c])
        chosen = None
        for a in boustrophedon(n):
            b = n - a
            for m in range(max(1, c - (b + 1)), min(c - 1, a + 1) + 1):
                w = tails[a][m] * table.get(b, c - m)
                if target < w:
                    chosen = (a, m)
                    break
                target -= w
            if chosen:
                break
        if chosen is None:
            raise SamplerError("exact weights do not add up; table is inconsistent")
        a, m = chosen
        target = pick(tails[a][m])
        for k1 in range(m, a + 2):
            w = rows[a][k1]
            if target < w:
                break
            target -= w
        marks[node] = k1 - m + 1
        first, second = count, count + 1
        count += 2
        size[first], contacts[first] = a, k1
        size[second], contacts[second] = n - a, c - m
        child1[node], child2[node] = first, second
        stack.append(second)
        stack.append(first)
    arr = lambda v: np.asarray(v, dtype=np.int64)
    return count, arr(size), arr(marks), arr(child1), arr(child2)


def _big_randbelow(rng, total):
    nbits = total.bit_length()
    nwords = (nbits + 62) // 63
    while True:
        words = rng.integers(0, 2**63, size=nwords, dtype=np.int64)
        v = 0
        for w in words:
            v = (v << 63) | int(w)
        v >>= nwords * 63 - nbits
        if v < total:
            return v


@dataclass
class SampledInterval:
    lower: np.ndarray
    upper: np.ndarray

    @property
    def size(self):
        return len(self.lower) // 2

    def to_interval(self):
        return TamariInterval(DyckPath._trusted(self.lower.tobytes()),
                              DyckPath._trusted(self.upper.tobytes()))


def sample_uniform(n, rng, weight_mode="log-float", compiled=True):
    """One uniform interval of size ``n`` as a :class:`SampledInterval`.

    ``weight_mode="exact"`` uses integer tables and is capped at
    ``EXACT_CAP``; ``"log-float"`` uses rescaled float tables.
    ``compiled=False`` runs the float kernels as plain Python.
    """
    if n < 0:
        raise SamplerError("size must be nonnegative")
    if weight_mode not in WEIGHT_MODES:
        raise SamplerError(f"unknown weight mode {weight_mode!r}")
    if n == 0:
        empty = np.zeros(0, dtype=np.uint8)
        return SampledInterval(empty, empty.copy())
    if weight_mode == "exact":
        if n > EXACT_CAP:
            raise SamplerError(f"exact weights are capped at size {EXACT_CAP}")
        table = _exact_table(n)
        count, size, marks, c1, c2 = _draw_tree_exact(n, table, rng)
        asm = _fastsample.assemble if compiled else _fastsample.assemble.py_func
        lower, upper = asm(count, size, marks, c1, c2)
        return SampledInterval(lower, upper)
    uniforms = rng.random(2 * n + 1)
    return sample_from_uniforms(n, uniforms, compiled)


def sample_from_uniforms(n, uniforms, compiled=True):
    """Float-weight sample driven by an explicit buffer of ``2n+1`` uniforms."""
    if len(uniforms) < 2 * n + 1:
        raise SamplerError(f"need {2 * n + 1} uniforms, got {len(uniforms)}")
    table, tails = _float_tables(n)
    rho = float(RHO)
    fn = _fastsample.sample_one_float if compiled else _sample_one_python
    lower, upper = fn(n, table, tails, rho, np.asarray(uniforms, dtype=np.float64))
    return SampledInterval(lower, upper)


def _sample_one_python(N, table, tails, rho, uniforms):
    nn = 2 * N + 1
    size = np.zeros(nn, dtype=np.int64)
    k1s = np.zeros(nn, dtype=np.int64)
    marks = np.zeros(nn, dtype=np.int64)
    child1 = np.full(nn, -1, dtype=np.int64)
    child2 = np.full(nn, -1, dtype=np.int64)
    contacts = np.zeros(nn, dtype=np.int64)
    count = _fastsample.draw_tree_float.py_func(N, table, tails, rho, uniforms, size, k1s,
                                                marks, child1, child2, contacts)
    return _fastsample.assemble.py_func(count, size, marks, child1, child2)


def sample_batch(n, count, seed, weight_mode="log-float"):
    """``count`` independent samples; sample ``i`` uses the ``i``-th child
    stream of ``SeedSequence(seed)`` so results do not depend on batching."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [sample_uniform(n, np.random.default_rng(ss), weight_mode) for ss in children]


def height_profile_moments(samples, kmax):
    """Per-sample sums of ``h**k`` over all abscissas for both paths.

    Returns two arrays of shape ``(len(samples), kmax+1)``: lower, upper.
    """
    lo = np.array([_fastsample.height_moments(s.lower, kmax) for s in samples])
    up = np.array([_fastsample.height_moments(s.upper, kmax) for s in samples])
    return lo, up


def contact_count(steps):
    heights = np.concatenate([[0], np.cumsum(np.where(steps == 1, 1, -1))])
    return int(np.count_nonzero(heights == 0))


def chi_square_uniform(observed_counts, expected_total=None):
    """Chi-square goodness of fit against the uniform distribution.

    ``observed_counts`` maps each outcome to its count; outcomes never
    observed must be present with count zero.
    """
    obs = np.array(list(observed_counts.values()), dtype=np.float64)
    total = obs.sum() if expected_total is None else expected_total
    exp = np.full(len(obs), total / len(obs))
    res = stats.chisquare(obs, exp)
    return float(res.statistic), float(res.pvalue)


def contact_distribution(n, table=None):
    """Exact law of the number of lower contacts at size ``n``."""
    table = table or _exact_table(max(n, 8))
    row = table.rows[n]
    total = sum(row)
    return {k: c / total for k, c in enumerate(row) if c}

