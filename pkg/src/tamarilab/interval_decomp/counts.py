"""Exact and scaled tables of intervals counted by lower-path contacts."""

import csv
import math
from fractions import Fraction

import numpy as np

from ..gf_engine import iterate_F
from ..tamari_core import interval_count_formula

RHO = Fraction(27, 256)


class CountTable:
    """``rows[n][k]`` = number of intervals of size ``n`` whose lower path
    has ``k`` contacts, for ``k = 0 .. n+1`` (entries 0 and, for ``n >= 1``,
    1 are zero)."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        self._tails = None

    @property
    def n_max(self):
        return len(self.rows) - 1

    def __getitem__(self, n):
        return self.rows[n]

    def get(self, n, k):
        row = self.rows[n]
        return row[k] if 0 <= k < len(row) else 0

    def row_sum(self, n):
        return sum(self.rows[n])

    def row_sums(self):
        return [sum(r) for r in self.rows]

    def tails(self):
        """``tails[a][m] = sum over k >= m of rows[a][k]``."""
        if self._tails is None:
            out = []
            for r in self.rows:
                acc = 0
                t = [0] * (len(r) + 1)
                for k in range(len(r) - 1, -1, -1):
                    acc += r[k]
                    t[k] = acc
                out.append(t)
            self._tails = out
        return self._tails

    def check_formula(self):
        """Sizes whose row sum differs from the closed-form interval count."""
        return [n for n in range(len(self.rows)) if self.row_sum(n) != interval_count_formula(n)]

    def to_csv(self, path_or_file):
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["n", "contacts", "count", "row_sum", "closed_form_total"])
            for n, row in enumerate(self.rows):
                total = sum(row)
                formula = interval_count_formula(n)
                for k, c in enumerate(row):
                    if c:
                        w.writerow([n, k, c, total, formula])
        finally:
            if own:
                fh.close()


def contact_ratio(n, k):
    """``rows[n][k+1] / rows[n][k]`` for ``2 <= k <= n``, a rational function
    of ``n`` and ``k`` (hypergeometric in ``k``)."""
    return Fraction(k * (k - (3 * n + 2)) * (k - (n + 1)) * (2 * k + 1),
                    (k - 2 * n) * (k - 1) * (k + 1) * (2 * k - (4 * n + 1)))


def closed_row(n):
    if n == 0:
        return [0, 1]
    row = [0] * (n + 2)
    row[2] = interval_count_formula(n - 1)
    for k in range(2, n + 1):
        r = contact_ratio(n, k)
        v = row[k] * r
        row[k + 1] = v.numerator // v.denominator
        if v.denominator != 1:
            raise ArithmeticError("contact ratio produced a non-integer")
    return row


def build_counts(n_max, method="recurrence"):
    """Count table up to ``n_max``.

    ``method="recurrence"`` iterates the contact equation through
    :func:`iterate_F`; ``method="closed"`` uses the hypergeometric row
    formula, which is linear in the row length and used for large tables.
    """
    if method == "recurrence":
        F = iterate_F(n_max)
        rows = []
        for n, p in enumerate(F.coeffs):
            row = [0] * (n + 2)
            for (k,), c in p.terms.items():
                row[k] = c
            rows.append(row)
        return CountTable(rows)
    if method == "closed":
        return CountTable([closed_row(n) for n in range(n_max + 1)])
    raise ValueError(f"unknown method {method!r}")


def log_interval_count(n):
    if n == 0:
        return 0.0
    return (math.log(2) - math.log(n) - math.log(n + 1)
            + math.lgamma(4 * n + 2) - math.lgamma(n) - math.lgamma(3 * n + 3))


def scaled_tables(n_max, contact_cap=256):
    """Float tables ``rows[n][k] * rho**n`` and their tails over ``k >= m``.

    Contacts above ``contact_cap`` are dropped; their total probability
    decays geometrically (ratio close to 3/4) and is below double
    precision long before the default cap.
    """
    width = contact_cap + 2
    table = np.zeros((n_max + 1, width), dtype=np.float64)
    table[0, 1] = 1.0
    log_rho = math.log(27 / 256)
    ks = np.arange(2, contact_cap, dtype=np.float64)
    block = 4096
    for lo in range(1, n_max + 1, block):
        hi = min(lo + block, n_max + 1)
        ns = np.arange(lo, hi, dtype=np.float64)[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = (ks * (ks - (3 * ns + 2)) * (ks - (ns + 1)) * (2 * ks + 1)
                     / ((ks - 2 * ns) * (ks - 1) * (ks + 1) * (2 * ks - (4 * ns + 1))))
        # the factor k - (n+1) vanishes at the last column; mask what lies beyond
        ratio = np.where(ks[None, :] < ns + 1, ratio, 0.0)
        first = np.exp([log_interval_count(n - 1) + n * log_rho for n in range(lo, hi)])
        table[lo:hi, 2] = first
        table[lo:hi, 3:contact_cap + 1] = first[:, None] * np.cumprod(ratio, axis=1)
    tails = np.cumsum(table[:, ::-1], axis=1)[:, ::-1].copy()
    return table, tails
