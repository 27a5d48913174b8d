"""The first-return decomposition of Tamari intervals and its inverse.

An interval ``(P, Q)`` of size ``n+1`` splits at the first return of the
upper path: ``Q = u Q1 d Q2``.  The lower path returns at the same place
or earlier, ``P = u P1' d P1'' P2``, and ``P1 = P1' P1''`` is the lower path
of the first piece with the contact between ``P1'`` and ``P1''`` marked.
"""

from dataclasses import dataclass

from ..tamari_core import UP, DOWN, DyckPath, PathError, TamariInterval


@dataclass(frozen=True)
class DecompStep:
    """Two intervals of total size ``n``; ``mark`` is a 1-based contact
    index of ``first.lower``."""

    first: TamariInterval
    mark: int
    second: TamariInterval

    def __post_init__(self):
        k = self.first.lower.contact_count()
        if not 1 <= self.mark <= k:
            raise PathError(f"mark {self.mark} outside 1..{k}")

    @property
    def size(self):
        return self.first.size + self.second.size + 1


def _first_return(steps):
    h = 0
    for i, s in enumerate(steps):
        h += 1 if s == UP else -1
        if h == 0:
            return i + 1
    raise PathError("path never returns")


def decompose(iv):
    """Split a nonempty interval into a :class:`DecompStep`."""
    p, q = iv.lower.steps, iv.upper.steps
    if not q:
        raise PathError("cannot decompose the empty interval")
    end = _first_return(q)
    head = p[:end]
    if DyckPath(head).heights()[-1] != 0:
        raise PathError("lower path is not below the upper path")
    i1 = _first_return(head)
    p1 = head[1:i1 - 1] + head[i1:]
    lower1 = DyckPath._trusted(p1)
    mark_at = i1 - 2
    mark = lower1.contacts().index(mark_at) + 1
    first = TamariInterval(lower1, DyckPath._trusted(q[1:end - 1]))
    second = TamariInterval(DyckPath._trusted(p[end:]), DyckPath._trusted(q[end:]))
    return DecompStep(first, mark, second)


def compose(ds):
    """Inverse of :func:`decompose`."""
    p1 = ds.first.lower.steps
    at = ds.first.lower.contacts()[ds.mark - 1]
    lower = bytes([UP]) + p1[:at] + bytes([DOWN]) + p1[at:] + ds.second.lower.steps
    upper = bytes([UP]) + ds.first.upper.steps + bytes([DOWN]) + ds.second.upper.steps
    return TamariInterval(DyckPath._trusted(lower), DyckPath._trusted(upper))


def non_final_contacts(path):
    return path.contact_count() - 1


def all_steps(intervals_by_size, n):
    """Every :class:`DecompStep` of total size ``n`` from per-size interval lists."""
    for a in range(n + 1):
        for first in intervals_by_size[a]:
            for mark in range(1, first.lower.contact_count() + 1):
                for second in intervals_by_size[n - a]:
                    yield DecompStep(first, mark, second)
