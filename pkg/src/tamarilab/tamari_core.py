"""Dyck paths, the Tamari covering move and a brute-force lattice oracle.

Paths are byte strings with 1 for an up step and 0 for a down step.  The
oracle builds the Tamari order on all paths of a given size by closing the
covering relation, and then counts the marked-interval statistics directly.
Everything here is meant for small sizes; it is the ground truth the fast
code paths are checked against.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

UP = 1
DOWN = 0
DEFAULT_CAP = 10


class PathError(ValueError):
    pass


class DyckPath:
    """A nonnegative lattice excursion made of up and down steps."""

    __slots__ = ("steps", "_heights")

    def __init__(self, steps):
        if isinstance(steps, str):
            steps = _parse_steps(steps)
        steps = bytes(steps)
        h = 0
        for s in steps:
            if s == UP:
                h += 1
            elif s == DOWN:
                h -= 1
                if h < 0:
                    raise PathError("path goes below the axis")
            else:
                raise PathError(f"bad step value {s}")
        if h != 0:
            raise PathError("path does not return to the axis")
        self.steps = steps
        self._heights = None

    @classmethod
    def _trusted(cls, steps):
        obj = cls.__new__(cls)
        obj.steps = bytes(steps)
        obj._heights = None
        return obj

    @property
    def size(self):
        return len(self.steps) // 2

    def __len__(self):
        return len(self.steps)

    def __eq__(self, other):
        return isinstance(other, DyckPath) and self.steps == other.steps

    def __lt__(self, other):
        return self.steps < other.steps

    def __hash__(self):
        return hash(self.steps)

    def __str__(self):
        return "".join("U" if s == UP else "D" for s in self.steps)

    def __repr__(self):
        return f"DyckPath('{self}')"

    def heights(self):
        """Heights at abscissas ``0 .. 2n`` (cached)."""
        if self._heights is None:
            out = [0]
            h = 0
            for s in self.steps:
                h += 1 if s == UP else -1
                out.append(h)
            self._heights = tuple(out)
        return self._heights

    def contacts(self):
        """Abscissas where the path touches the axis, in increasing order."""
        return [i for i, h in enumerate(self.heights()) if h == 0]

    def contact_count(self):
        return sum(1 for h in self.heights() if h == 0)

    def area(self):
        return sum(self.heights())

    def upstep_starts(self):
        """Abscissa where each up step starts, in order."""
        return [i for i, s in enumerate(self.steps) if s == UP]

    def matching_down(self, i):
        """Start abscissa of the down step matched with the up step at ``i``."""
        if self.steps[i] != UP:
            raise PathError(f"no up step at {i}")
        depth = 0
        for k in range(i, len(self.steps)):
            depth += 1 if self.steps[k] == UP else -1
            if depth == 0:
                return k
        raise PathError("unmatched up step")


def _parse_steps(text):
    table = {"U": UP, "u": UP, "1": UP, "(": UP, "D": DOWN, "d": DOWN, "0": DOWN, ")": DOWN}
    try:
        return bytes(table[c] for c in text if not c.isspace())
    except KeyError as exc:
        raise PathError(f"unknown step character {exc}") from None


def height_at(path, i):
    """Height of the path after its first ``i`` steps."""
    if not 0 <= i <= len(path.steps):
        raise PathError(f"abscissa {i} outside 0..{len(path.steps)}")
    return path.heights()[i]


def upstep_height(path, j):
    """Starting height of the ``j``-th up step (1-based)."""
    if not 1 <= j <= path.size:
        raise PathError(f"up-step index {j} outside 1..{path.size}")
    seen = 0
    h = 0
    for s in path.steps:
        if s == UP:
            seen += 1
            if seen == j:
                return h
            h += 1
        else:
            h -= 1
    raise PathError("unreachable")


def covering_successors(path):
    """Paths obtained by one Tamari covering move.

    For each down step followed by an up step, the down step is swapped
    with the shortest excursion that follows it.
    """
    steps = path.steps
    out = set()
    for i in range(len(steps) - 1):
        if steps[i] == DOWN and steps[i + 1] == UP:
            depth = 0
            k = i + 1
            while True:
                depth += 1 if steps[k] == UP else -1
                k += 1
                if depth == 0:
                    break
            moved = steps[:i] + steps[i + 1:k] + bytes([DOWN]) + steps[k:]
            out.add(DyckPath._trusted(moved))
    return out


def catalan(n):
    return comb(2 * n, n) // (n + 1)


def interval_count_formula(n):
    """Closed-form number of Tamari intervals of size ``n``."""
    if n == 0:
        return 1
    return 2 * comb(4 * n + 1, n - 1) // (n * (n + 1))


def all_dyck_paths(n):
    """All Dyck paths of size ``n`` in lexicographic order of steps."""
    out = []
    buf = bytearray(2 * n)

    def rec(pos, ups, h):
        if pos == 2 * n:
            out.append(DyckPath._trusted(buf))
            return
        if h > 0:
            buf[pos] = DOWN
            rec(pos + 1, ups, h - 1)
        if ups < n:
            buf[pos] = UP
            rec(pos + 1, ups + 1, h + 1)

    rec(0, 0, 0)
    return out


@dataclass(frozen=True, order=True)
class TamariInterval:
    """A pair of Dyck paths ``lower <= upper`` in the Tamari order."""

    lower: DyckPath
    upper: DyckPath

    def __post_init__(self):
        if len(self.lower.steps) != len(self.upper.steps):
            raise PathError("paths of different sizes")

    @property
    def size(self):
        return self.lower.size

    def __str__(self):
        return f"{self.lower}\n{self.upper}"

    @classmethod
    def from_strings(cls, lower, upper):
        return cls(DyckPath(lower), DyckPath(upper))


class TamariOracle:
    """Tamari order on all paths of size ``n`` by explicit closure.

    ``upsets[i]`` is a bitmask over path indices: bit ``j`` is set when
    ``paths[i] <= paths[j]``.  The covering move strictly increases the area
    under the path, so processing paths by decreasing area sees every
    successor before its predecessors.
    """

    def __init__(self, n, cap=DEFAULT_CAP):
        if n > cap:
            raise ValueError(f"size {n} exceeds the brute-force cap {cap}")
        self.n = n
        self.paths = all_dyck_paths(n)
        self.index = {p.steps: i for i, p in enumerate(self.paths)}
        self.successors = [[self.index[q.steps] for q in covering_successors(p)]
                           for p in self.paths]
        areas = [p.area() for p in self.paths]
        for i, succ in enumerate(self.successors):
            for j in succ:
                if areas[j] <= areas[i]:
                    raise AssertionError("covering move did not increase the area")
        upsets = [0] * len(self.paths)
        for i in sorted(range(len(self.paths)), key=lambda k: -areas[k]):
            mask = 1 << i
            for j in self.successors[i]:
                mask |= upsets[j]
            upsets[i] = mask
        self.upsets = upsets

    def leq(self, lower, upper):
        i = self.index[lower.steps]
        j = self.index[upper.steps]
        return bool(self.upsets[i] >> j & 1)

    def count(self):
        return sum(bin(m).count("1") for m in self.upsets)

    def uppers(self, i):
        """Indices of all paths above ``paths[i]``."""
        m = self.upsets[i]
        out = []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return out

    def intervals(self):
        for i, p in enumerate(self.paths):
            for j in self.uppers(i):
                yield TamariInterval(p, self.paths[j])

    def edge_count(self):
        return sum(len(s) for s in self.successors)


@lru_cache(maxsize=None)
def oracle(n, cap=DEFAULT_CAP):
    return TamariOracle(n, cap)


def all_intervals(n, cap=DEFAULT_CAP):
    """Every Tamari interval of size ``n`` (brute force, ``n <= cap``)."""
    if n > cap:
        raise ValueError(f"size {n} exceeds the brute-force cap {cap}")
    return set(oracle(n, cap).intervals())


def count_intervals(n, cap=DEFAULT_CAP):
    """Number of intervals by closure, without materializing them."""
    return oracle(n, cap).count()


def is_tamari_leq(lower, upper, cap=DEFAULT_CAP):
    if lower.size != upper.size:
        return False
    return oracle(lower.size, cap).leq(lower, upper)


def census_contacts(n):
    """``{k: number of intervals whose lower path has k contacts}``."""
    orc = oracle(n)
    out = {}
    for i, p in enumerate(orc.paths):
        mult = bin(orc.upsets[i]).count("1")
        k = p.contact_count()
        out[k] = out.get(k, 0) + mult
    return out


def census_upper_marked(n):
    """Terms ``{(contacts of lower, upper height): count}`` over marked abscissas."""
    orc = oracle(n)
    out = {}
    for i, p in enumerate(orc.paths):
        c = p.contact_count()
        for j in orc.uppers(i):
            for h in orc.paths[j].heights():
                key = (c, h)
                out[key] = out.get(key, 0) + 1
    return out


def census_lower_marked(n):
    """Terms ``{(contacts before i, contacts at or after i, lower height): count}``."""
    orc = oracle(n)
    out = {}
    for i, p in enumerate(orc.paths):
        mult = bin(orc.upsets[i]).count("1")
        hs = p.heights()
        total = p.contact_count()
        before = 0
        for h in hs:
            key = (before, total - before, h)
            out[key] = out.get(key, 0) + mult
            if h == 0:
                before += 1
    return out


def census_upstep_marked(n):
    """Terms ``{(contacts up to the up step, contacts after it, Q~ - 3 P~): count}``.

    The ``j``-th up step is marked on both paths; a contact at the start of
    the marked step of the lower path counts on the first side.
    """
    orc = oracle(n)
    out = {}
    for i, p in enumerate(orc.paths):
        ph = p.heights()
        pstarts = p.upstep_starts()
        contacts = p.contacts()
        split = [sum(1 for c in contacts if c <= a) for a in pstarts]
        total = len(contacts)
        for j in orc.uppers(i):
            q = orc.paths[j]
            qh = q.heights()
            for idx, (a, b) in enumerate(zip(pstarts, q.upstep_starts())):
                key = (split[idx], total - split[idx], qh[b] - 3 * ph[a])
                out[key] = out.get(key, 0) + 1
    return out


def census_upper_two_contacts(n):
    """``{k: count}`` of intervals whose upper path has exactly two contacts,
    indexed by the number of contacts of the lower path."""
    orc = oracle(n)
    out = {}
    for i, p in enumerate(orc.paths):
        for j in orc.uppers(i):
            if orc.paths[j].contact_count() == 2:
                k = p.contact_count()
                out[k] = out.get(k, 0) + 1
    return out


def couple_abscissa(path, rng):
    """Draw ``(I, J)`` with ``J`` uniform on ``1..n`` and ``I`` uniform on ``0..2n-1``.

    ``I`` is the start of the ``J``-th up step or of its matching down
    step, each with probability one half, so the height at ``I`` differs
    from the starting height of the ``J``-th up step by at most one.
    """
    n = path.size
    if n == 0:
        raise PathError("empty path")
    j = int(rng.integers(1, n + 1))
    start = path.upstep_starts()[j - 1]
    if rng.integers(0, 2):
        return path.matching_down(start), j
    return start, j


def coupling_outcomes(path):
    """All ``2n`` equally likely outcomes ``(I, J)`` of :func:`couple_abscissa`."""
    out = []
    for j, start in enumerate(path.upstep_starts(), start=1):
        out.append((start, j))
        out.append((path.matching_down(start), j))
    return out


def random_dyck_path(n, rng):
    """Uniform Dyck path of size ``n`` by the cycle lemma."""
    steps = np.array([1] * n + [-1] * (n + 1), dtype=np.int64)
    rng.shuffle(steps)
    walk = np.cumsum(steps)
    k = int(np.argmin(walk))  # first minimum
    rotated = np.concatenate([steps[k + 1:], steps[:k + 1]])
    return DyckPath._trusted((rotated[:-1] > 0).astype(np.uint8).tobytes())


def coupling_gaps(path, rng, draws):
    """``|P(I) - P~(J)|`` for ``draws`` independent coupling draws on one path.

    Vectorized version of :func:`couple_abscissa`: the matching down step of
    every up step is found once with a stack.
    """
    n = path.size
    if n == 0:
        raise PathError("empty path")
    heights = np.asarray(path.heights(), dtype=np.int64)
    starts = np.asarray(path.upstep_starts(), dtype=np.int64)
    partner = np.empty(n, dtype=np.int64)
    stack = []
    order = {int(s): k for k, s in enumerate(starts)}
    for i, s in enumerate(path.steps):
        if s == UP:
            stack.append(i)
        else:
            partner[order[stack.pop()]] = i
    j = rng.integers(0, n, size=draws)
    use_down = rng.integers(0, 2, size=draws).astype(bool)
    where = np.where(use_down, partner[j], starts[j])
    return np.abs(heights[where] - heights[starts[j]])
