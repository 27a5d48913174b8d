"""Coefficient-by-coefficient iteration of the catalytic equations.

Each array stores ``[t^n]`` of a generating function as a polynomial in
its catalytic variables and a height variable:

* ``F``: lower-path contacts ``x``.
* ``H``: contacts ``x`` and the upper height ``s`` at a marked abscissa.
* ``G``: lower contacts before ``x`` and from ``y`` on, lower height ``w``.
* ``M``: lower contacts ``x`` / ``y`` around a marked up step, and
  ``w**(upper height - 3 * lower height)`` (Laurent in ``w``).

In jet mode the height variable is replaced by ``1 + r`` and every
coefficient is truncated above ``r**K``.  That keeps just enough
information for the first ``K`` factorial moments at a fraction of the cost.
"""

import json
import os
from fractions import Fraction
from math import factorial

from .exactnum import MultiPoly, TruncSeries
from .exactnum.kronecker import kron_sum_of_products

HEIGHT_VAR = {"F": None, "H": "s", "G": "w", "M": "w"}
JET_VAR = "r"
TRIVARIATE_CAP = 40
BIVARIATE_CAP = 200
CACHE_ENV = "TAMARI_CACHE_DIR"


class GFArray:
    """Per-size coefficients of one generating function."""

    def __init__(self, tag, coeffs, vars, laurent=(), jet=None):
        self.tag = tag
        self.coeffs = list(coeffs)
        self.vars = tuple(vars)
        self.laurent = frozenset(laurent)
        self.jet = jet

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def height_var(self):
        if self.tag == "F":
            return None
        return JET_VAR if self.jet is not None else HEIGHT_VAR[self.tag]

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def at_ones(self, n, keep=()):
        """Coefficient ``n`` with every variable outside ``keep`` set to 1."""
        p = self.coeffs[n]
        for name in p.vars:
            if name not in keep:
                p = p.subs(name, 1)
        return p

    def totals(self):
        """``[t^n]`` at all variables equal to one (jet: ``r = 0``)."""
        out = []
        for p in self.coeffs:
            if self.jet is not None:
                p = p.coeff(JET_VAR, 0)
            out.append(sum(p.terms.values()))
        return out

    def to_json(self):
        rows = []
        for p in self.coeffs:
            p = p.with_vars(self.vars, self.laurent)
            rows.append([[list(e), _num_str(c)] for e, c in sorted(p.terms.items())])
        return json.dumps({"tag": self.tag, "vars": list(self.vars),
                           "laurent": sorted(self.laurent), "jet": self.jet,
                           "coeffs": rows})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        vars = tuple(d["vars"])
        coeffs = []
        for row in d["coeffs"]:
            terms = {tuple(e): _num_parse(c) for e, c in row}
            coeffs.append(MultiPoly(terms, vars, d["laurent"]))
        return cls(d["tag"], coeffs, vars, d["laurent"], d["jet"])

    def truncated(self, n):
        return GFArray(self.tag, self.coeffs[:n + 1], self.vars, self.laurent, self.jet)


def _num_str(c):
    return str(c)


def _num_parse(s):
    f = Fraction(s)
    return f.numerator if f.denominator == 1 else f


def _conv(pairs, vars, laurent):
    """Exact ``sum(p*q)`` of aligned polynomials through one packed product."""
    pairs = [(p.with_vars(vars, laurent), q.with_vars(vars, laurent)) for p, q in pairs]
    pairs = [(p, q) for p, q in pairs if p.terms and q.terms]
    if not pairs:
        return MultiPoly({}, vars, laurent)
    if all(p.is_integral() and q.is_integral() for p, q in pairs):
        terms = kron_sum_of_products([(p.terms, q.terms) for p, q in pairs], len(vars))
        return MultiPoly._raw(terms, vars, frozenset(laurent))
    acc = MultiPoly({}, vars, laurent)
    for p, q in pairs:
        acc = acc + p * q
    return acc


def _div_var(p, name):
    """Exact division by a variable (every term must contain it)."""
    i = p.vars.index(name)
    terms = {}
    for e, c in p.terms.items():
        if e[i] < 1 and name not in p.laurent:
            raise ArithmeticError(f"polynomial not divisible by {name}")
        terms[e[:i] + (e[i] - 1,) + e[i + 1:]] = c
    return MultiPoly._raw(terms, p.vars, p.laurent)


def _mul_var(p, name, k=1):
    i = p.vars.index(name)
    return MultiPoly._raw({e[:i] + (e[i] + k,) + e[i + 1:]: c for e, c in p.terms.items()},
                          p.vars, p.laurent)


def _quotient(p, name):
    """``(p - p|name=1) / (name - 1)``, asserting the division is exact."""
    at_one = p.subs(name, 1).with_vars(p.vars, p.laurent)
    return (p - at_one).div_var_minus_one(name)


def _jet_trunc(p, jet):
    return p.truncate(JET_VAR, jet) if jet is not None else p


def _height_factor(vars, laurent, jet, power, height_name):
    """``h**power`` for the height variable, or its jet ``(1+r)**power``."""
    if jet is None:
        return MultiPoly.monomial(1, {height_name: power}, laurent).with_vars(vars, laurent)
    # (1 + r)**power truncated at r**jet; power may be negative
    coeffs = []
    c = Fraction(1)
    for j in range(jet + 1):
        coeffs.append(c)
        c = c * (power - j) / (j + 1)
    p = MultiPoly.from_univariate([int(v) for v in coeffs], JET_VAR)
    return p.with_vars(vars, laurent)


def iterate_F(N):
    """``[t^n]F`` for ``n <= N`` as polynomials in ``x``."""
    vars = ("x",)
    x = MultiPoly.var("x")
    coeffs = [x]
    deltas = [x.divided_difference("x")]
    for n in range(N):
        nxt = _conv([(coeffs[n - a], deltas[a]) for a in range(n + 1)], vars, ())
        coeffs.append(nxt)
        deltas.append(nxt.divided_difference("x"))
    return GFArray("F", coeffs, vars)


def _f_data(F, name):
    """``F_n`` renamed to the given catalytic variable."""
    return [p.rename({"x": name}) if name != "x" else p for p in F.coeffs]


def iterate_H(N, F=None, jet=None):
    """``[t^n]H``: marked abscissa, ``s`` marks the upper height there."""
    if F is None or F.order < N:
        F = iterate_F(N)
    hv = "s" if jet is None else JET_VAR
    vars = ("x", hv)
    lau = frozenset()
    Fx = [p.with_vars(vars) for p in F.coeffs]
    dF = [p.divided_difference("x") for p in Fx]
    s = _height_factor(vars, lau, jet, 1, "s")
    coeffs = [Fx[0]]
    dH = [Fx[0].divided_difference("x")]
    for n in range(N):
        marked_first = _conv([(Fx[n - a], dH[a]) for a in range(n + 1)], vars, lau)
        marked_second = _conv([(coeffs[n - a], dF[a]) for a in range(n + 1)], vars, lau)
        nxt = Fx[n + 1] + _jet_trunc(s * marked_first, jet) + marked_second
        nxt = _jet_trunc(nxt, jet)
        coeffs.append(nxt)
        dH.append(nxt.divided_difference("x"))
    return GFArray("H", coeffs, vars, lau, jet)


def iterate_G(N, F=None, jet=None):
    """``[t^n]G``: marked abscissa, lower contacts split at it, ``w`` marks
    the lower height there."""
    if F is None or F.order < N:
        F = iterate_F(N)
    hv = "w" if jet is None else JET_VAR
    vars = ("x", "y", hv)
    lau = frozenset()
    Fx = [p.with_vars(vars) for p in F.coeffs]
    Fy = [p.with_vars(vars) for p in _f_data(F, "y")]
    dFx = [p.divided_difference("x") for p in Fx]
    w = _height_factor(vars, lau, jet, 1, "w")
    y = MultiPoly.var("y").with_vars(vars)
    coeffs = [Fy[0]]
    brackets = []

    def bracket(a):
        g = coeffs[a]
        g_1y = g.subs("x", 1).with_vars(vars)
        below = _jet_trunc(w * _mul_var(_quotient(g_1y, "y"), "x"), jet)
        # F(y) - y F(1), divided by (y - 1)
        fa1 = Fx[a].subs("x", 1).constant_value()
        first = _mul_var((Fy[a] - y * fa1).div_var_minus_one("y"), "x")
        # interval with the last abscissa marked removed: G - (y/x) F(x)
        tilde = g - _div_var(_mul_var(Fx[a], "y"), "x")
        after = _mul_var(_div_var(_quotient(tilde, "x"), "y"), "x", 2)
        return below + first + after

    for n in range(N):
        brackets.append(bracket(n))
        nxt = Fy[n + 1] + _conv([(brackets[a], Fy[n - a]) for a in range(n + 1)]
                                + [(dFx[a], coeffs[n - a]) for a in range(n + 1)], vars, lau)
        coeffs.append(_jet_trunc(nxt, jet))
    return GFArray("G", coeffs, vars, lau, jet)


def iterate_M(N, F=None, jet=None):
    """``[t^n]M``: marked up step on both paths, lower contacts split at it,
    ``w`` marks upper minus three times lower starting height."""
    if F is None or F.order < N:
        F = iterate_F(N)
    hv = "w" if jet is None else JET_VAR
    vars = ("x", "y", hv)
    lau = frozenset(["w"]) if jet is None else frozenset()
    Fx = [p.with_vars(vars, lau) for p in F.coeffs]
    Fy = [p.with_vars(vars, lau) for p in _f_data(F, "y")]
    dFx = [p.divided_difference("x") for p in Fx]
    w = _height_factor(vars, lau, jet, 1, "w")
    w_m2 = _height_factor(vars, lau, jet, -2, "w")
    coeffs = [MultiPoly({}, vars, lau)]
    brackets = []

    def bracket(a):
        m = coeffs[a]
        if not m.terms:
            return m
        m_1y = m.subs("x", 1).with_vars(vars, lau)
        before = _jet_trunc(w_m2 * _mul_var(_quotient(m_1y, "y"), "x"), jet)
        after = _jet_trunc(w * _mul_var(_div_var(_quotient(m, "x"), "y"), "x", 2), jet)
        return before + after

    for n in range(N):
        brackets.append(bracket(n))
        first_step = _mul_var(_div_var(Fy[n + 1], "y"), "x")
        nxt = first_step + _conv([(brackets[a], Fy[n - a]) for a in range(n + 1)]
                                 + [(dFx[a], coeffs[n - a]) for a in range(n + 1)], vars, lau)
        coeffs.append(_jet_trunc(nxt, jet))
    return GFArray("M", coeffs, vars, lau, jet)


ITERATORS = {"F": iterate_F, "H": iterate_H, "G": iterate_G, "M": iterate_M}


def factorial_moment_values(array, k):
    """``[t^n]`` of the ``k``-th derivative in the height variable at 1.

    For ``H`` and ``G`` this is ``(2n+1) * a_n * E[(X_n)_k]`` and for ``M``
    it is ``n * a_n * E[(X_n)_k]``, where ``a_n`` counts intervals.
    """
    hv = array.height_var
    if hv is None:
        raise ValueError("F has no height variable")
    out = []
    for p in array.coeffs:
        if hv not in p.vars:
            out.append(sum(p.terms.values()) if k == 0 else 0)
            continue
        i = p.vars.index(hv)
        acc = 0
        if array.jet is not None:
            if k > array.jet:
                raise ValueError(f"jet of order {array.jet} cannot give moment {k}")
            for e, c in p.terms.items():
                if e[i] == k:
                    acc += c
            acc *= factorial(k)
        else:
            for e, c in p.terms.items():
                f = 1
                for j in range(k):
                    f *= e[i] - j
                acc += c * f
        out.append(acc)
    return out


def factorial_moment_series(array, k, normalize=False):
    """Factorial-moment generating series in ``t`` (exact).

    With ``normalize`` the ``n``-th coefficient is divided by the number of
    marked positions (``2n+1`` abscissas, or ``n`` up steps), giving
    ``a_n * E[(X_n)_k]``.
    """
    vals = factorial_moment_values(array, k)
    if normalize:
        choices = (lambda n: n) if array.tag == "M" else (lambda n: 2 * n + 1)
        vals = [Fraction(v, choices(n)) if choices(n) else Fraction(0) for n, v in enumerate(vals)]
    return TruncSeries("t", len(vals) - 1, vals)


def mean_factorial_moments(array, k, counts):
    """``E[(X_n)_k]`` per size as exact fractions; ``counts[n] = a_n``."""
    vals = factorial_moment_values(array, k)
    out = []
    for n, v in enumerate(vals):
        choices = n if array.tag == "M" else 2 * n + 1
        out.append(Fraction(v, choices * counts[n]) if choices else None)
    return out


def cache_path(tag, N, jet):
    base = os.environ.get(CACHE_ENV)
    if not base:
        return None
    suffix = f"jet{jet}" if jet is not None else "full"
    return os.path.join(base, f"{tag}_{suffix}_{N}.json")


def load_or_iterate(tag, N, jet=None):
    """Iterate an array, reusing a snapshot from the cache directory if one
    of at least the requested order exists there."""
    base = os.environ.get(CACHE_ENV)
    if base and os.path.isdir(base):
        suffix = f"jet{jet}" if jet is not None else "full"
        best = None
        for name in os.listdir(base):
            parts = name[:-5].split("_") if name.endswith(".json") else []
            if len(parts) == 3 and parts[0] == tag and parts[1] == suffix:
                n = int(parts[2])
                if n >= N and (best is None or n < best):
                    best = n
        if best is not None:
            with open(os.path.join(base, f"{tag}_{suffix}_{best}.json")) as fh:
                return GFArray.from_json(fh.read()).truncated(N)
    if tag == "F":
        arr = iterate_F(N)
    else:
        arr = ITERATORS[tag](N, jet=jet)
    path = cache_path(tag, N, jet)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            fh.write(arr.to_json())
    return arr


def census_of(tag, n):
    """Brute-force terms of ``[t^n]`` keyed by exponent tuples (oracle side)."""
    from . import tamari_core as tc
    if tag == "F":
        return {(k,): c for k, c in tc.census_contacts(n).items()}
    table = {"H": tc.census_upper_marked, "G": tc.census_lower_marked,
             "M": tc.census_upstep_marked}[tag]
    return dict(table(n))


def compare_with_census(tag, n_max, array=None):
    """Sizes ``n <= n_max`` where the iterated coefficients differ from the
    lattice oracle.  An empty list means exact agreement."""
    if array is None or array.order < n_max:
        array = ITERATORS[tag](n_max)
    if array.jet is not None:
        raise ValueError("the census comparison needs full coefficients, not jets")
    bad = []
    for n in range(n_max + 1):
        p = array.coeffs[n].with_vars(array.vars, array.laurent)
        if dict(p.terms) != census_of(tag, n):
            bad.append(n)
    return bad
