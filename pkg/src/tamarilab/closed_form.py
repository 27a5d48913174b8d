"""Exact checks of the rational parametrizations and algebraic equations.

Every check works in the ``z`` chart: counting series in ``t`` are composed
with ``t(z) = z(1-z)^3`` and compared, coefficient by coefficient, with the
closed form expanded in ``z``.  A check passes only when the residual is
identically zero through the requested order; otherwise the report names
the first failing ``z`` order and monomial.
"""

import json
from fractions import Fraction

from .exactnum import (MultiPoly, TruncSeries, SeriesError, newton_residual, parse_in_unknown,
                       parse_poly, parse_series, series_newton_root, substitute_series)
from .exactnum.multipoly import monomial_str
from .gf_engine import iterate_F, iterate_G, iterate_H, iterate_M

# Annihilating polynomial of G(1,1) composed with t(z); unknown h.
G_ANNIHILATOR = (
    "w*z*(z-1)^9*h^3+(z-1)^6*(2*w^2*z^2-w^2*z+2*z^2+w-z)*h^2"
    "-(z-1)^3*(w^2*z^3-3*w^2*z^2-2*w*z^3+w^2*z-2*w*z^2+z^3+5*w*z-3*z^2-2*w+z)*h"
    "+4*w*z^2-4*w*z+w"
)

# M(1,1) composed with t(z) is R(z, V0) with V0 a root of the equation below.
M_RATIONAL_NUM = "(V*z^2-z^2+3*z-1)*V*w^2"
M_RATIONAL_DEN = "V*z^4-3*V*z^3+3*V*z^2+z^3-V*z-3*z^2+3*z-1"
M_ROOT_EQUATION = (
    "V^5*w^5*z^5+V^5*w^4*z^5+V^5*w^3*z^5+5*V^4*w^5*z^4+V^5*w^2*z^5-2*V^4*w^5*z^3"
    "+5*V^4*w^4*z^4-V^3*w^4*z^5+V^5*w*z^5-2*V^4*w^4*z^3+5*V^4*w^3*z^4+2*V^4*w^2*z^5"
    "+8*V^3*w^5*z^3+3*V^3*w^4*z^4-V^3*w^3*z^5-2*V^4*w^3*z^3+4*V^4*w^2*z^4+2*V^4*w*z^5"
    "-6*V^3*w^5*z^2+5*V^3*w^4*z^3+3*V^3*w^3*z^4+V^3*w^2*z^5-2*V^2*w^4*z^4-V^4*w^2*z^3"
    "+4*V^4*w*z^4+V^3*w^5*z-5*V^3*w^4*z^2+5*V^3*w^3*z^3+8*V^3*w^2*z^4+V^3*w*z^5"
    "+4*V^2*w^5*z^2+7*V^2*w^4*z^3-2*V^2*w^3*z^4-V^4*w*z^3+V^3*w^4*z-5*V^3*w^3*z^2"
    "+V^3*w^2*z^3+8*V^3*w*z^4-4*V^2*w^5*z-5*V^2*w^4*z^2+7*V^2*w^3*z^3+4*V^2*w^2*z^4"
    "+V^3*w^3*z-V^3*w^2*z^2+V^3*w*z^3+V^2*w^5+V^2*w^4*z-5*V^2*w^3*z^2+6*V^2*w^2*z^3"
    "+4*V^2*w*z^4-V^3*w*z^2-2*V^3*z^3+V^2*w^3*z-5*V^2*w^2*z^2+5*V^2*w*z^3+4*V*w^2*z^3"
    "+V^3*z^2+3*V^2*w^2*z-2*V^2*w*z^2-4*V^2*z^3-4*V*w^2*z^2+3*V*w*z^3-V^2*w^2"
    "+3*V*w^2*z-V*w*z^2-2*V*z^3+V^2*z-V*w^2-3*V*z^2+2*V*z-2*z^2+z"
)
# candidate first coefficients of V0 (the z^1 term)
M_ROOT_GERMS = {"z/w": "w^-1", "z/w^2": "w^-2"}

# kernel of the upper-path equation, unknown U, root U(z, s) = s z + O(z^2)
H_KERNEL = "s*(1+U)^2*z*(U*z^2+2*z-1)+U*(1-z)^3"

# second factor of the lower-path kernel and its closed-form root
LOWER_KERNEL_FACTOR = "(v*z^2-z^2+3*z-1)*u+v*z^2+z"
LOWER_ROOT_NUM = "z*(1+v*z)"
LOWER_ROOT_DEN = "1-3*z+z^2-v*z^2"

# kernel of the mixed equation, unknown u, root w z + O(z^2)
MIXED_KERNEL = (
    "u^2*v^2*w*z^4+2*u*v^2*w*z^4+3*u^2*v*w*z^3+v^2*w*z^4-u^2*v*w*z^2-u^2*z^4"
    "+6*u*v*w*z^3+2*u^2*w*z^2+3*u^2*z^3-2*u*v*w*z^2+3*v*w*z^3-u^2*w*z-3*u^2*z^2"
    "+4*u*w*z^2-u*z^3-v*w*z^2+u^2*z-2*u*w*z+3*u*z^2+2*w*z^2-3*u*z-w*z+u"
)

SINGULAR_POINT = Fraction(1, 4)
RHO = Fraction(27, 256)


class Report(dict):
    """Result of one check: name, order, pass flag, first discrepancy."""

    def __init__(self, check, order, passed, discrepancy=None, **details):
        super().__init__(check=check, order=order, passed=passed,
                         discrepancy=discrepancy, **details)

    @property
    def passed(self):
        return self["passed"]

    def to_json(self):
        return json.dumps(self, default=str, indent=2)


def first_discrepancy(residual):
    """``{"order", "monomial", "coefficient"}`` of the lowest nonzero
    residual term, or None when the residual vanishes."""
    hit = residual.first_nonzero()
    if hit is None:
        return None
    k, c = hit
    e, v = min(c.terms.items())
    return {"order": k, "monomial": monomial_str(c.vars, e) or "1", "coefficient": str(v)}


def _report(check, residual, **details):
    bad = first_discrepancy(residual)
    return Report(check, residual.order, bad is None, bad, **details)


def t_of_z(order):
    """``z (1 - z)^3`` as a series in ``z``."""
    return TruncSeries("z", order, [0, 1, -3, 3, -1])


def _z_expand(text, order, laurent=()):
    return parse_series(text, "z", order, laurent)


def compose_with_t(coeffs, order):
    """``sum_n coeffs[n] t(z)^n``; each entry is a polynomial or a z-series."""
    t = t_of_z(order)
    coeffs = list(coeffs)[:order + 1]
    acc = TruncSeries.constant("z", order, 0)
    for c in reversed(coeffs):
        if not isinstance(c, TruncSeries):
            c = TruncSeries("z", order, [c])
        acc = acc * t + c
    return acc


def contact_chart(order, name="x", param="u"):
    """``(1 + param) / (1 + z param)^2`` as a series in ``z``."""
    z = TruncSeries.variable("z", order)
    p = MultiPoly.var(param)
    base = TruncSeries.constant("z", order, 1) + z * p
    return TruncSeries.constant("z", order, 1 + p) * (base * base).inverse()


def verify_F(order=20, bivariate_order=10, F=None):
    """Univariate and bivariate checks of the contact series parametrization."""
    need = max(order, bivariate_order)
    if F is None or F.order < need:
        F = iterate_F(need)
    lhs = compose_with_t(F.totals(), order)
    rhs = _z_expand("(1-2*z)", order) / _z_expand("(1-z)^3", order)
    univariate = lhs - rhs
    X = contact_chart(bivariate_order)
    parts = [substitute_series(p, "x", X) for p in F.coeffs[:bivariate_order + 1]]
    lhs2 = compose_with_t(parts, bivariate_order)
    rhs2 = (_z_expand("(1+u)*(1-2*z-z^2*u)", bivariate_order)
            / (_z_expand("(1+z*u)*(1-z)^3", bivariate_order)))
    bivariate = lhs2 - rhs2
    uni = first_discrepancy(univariate)
    bi = first_discrepancy(bivariate)
    return Report("F", order, uni is None and bi is None, uni or bi,
                  bivariate_order=bivariate_order,
                  leading_terms=[str(c) for c in lhs.coeffs[:4]])


def upper_kernel_root(order):
    """Series root ``U(z, s)`` of the upper-path kernel, ``s z + O(z^2)``."""
    phi = parse_in_unknown(H_KERNEL, "U", "z", order)
    return series_newton_root(phi, MultiPoly.var("s"), order)


def verify_H(order=12, H=None):
    """Checks ``H(t(z), 1, s)`` against its expression in ``U`` and the
    inverse relation giving ``s`` back from ``U``."""
    if H is None or H.order < order:
        H = iterate_H(order)
    lhs = compose_with_t([H.at_ones(n, keep=("s",)) for n in range(order + 1)], order)
    U = upper_kernel_root(order)
    z = TruncSeries.variable("z", order)
    one = TruncSeries.constant("z", order, 1)
    inner = one - z * 2 - U * z * z
    rhs = inner * inner * (one + U) / _z_expand("(1-z)^6", order)
    residual = lhs - rhs
    # s = U (1-z)^3 / (z (1+U)^2 (1 - U z^2 - 2 z)), one order is used by U/z
    lower = order - 1
    U_over_z = U.shift(-1).truncate(lower)
    Ut = U.truncate(lower)
    onel = one.truncate(lower)
    zl = z.truncate(lower)
    back = (U_over_z * _z_expand("(1-z)^3", lower)
            / ((onel + Ut) * (onel + Ut) * (onel - Ut * zl * zl - zl * 2)))
    round_trip = back - TruncSeries.constant("z", lower, MultiPoly.var("s"))
    main = first_discrepancy(residual)
    trip = first_discrepancy(round_trip)
    return Report("H", order, main is None and trip is None, main or trip,
                  root_germ="s*z", round_trip_order=lower,
                  leading_terms=[str(c) for c in lhs.coeffs[:3]])


def verify_G_annihilator(order=20, G=None):
    """Plugs ``G(1,1)`` composed with ``t(z)`` into its cubic equation."""
    if G is None or G.order < order:
        G = iterate_G(order)
    h = compose_with_t([G.at_ones(n, keep=("w",)) for n in range(order + 1)], order)
    phi = parse_in_unknown(G_ANNIHILATOR, "h", "z", order)
    return _report("G_annihilator", newton_residual(phi, h),
                   leading_terms=[str(c) for c in h.coeffs[:3]])


def mixed_series(order, M=None):
    """``M(1,1)`` composed with ``t(z)``, Laurent in ``w``."""
    if M is None or M.order < order:
        M = iterate_M(order)
    return compose_with_t([M.at_ones(n, keep=("w",)) for n in range(order + 1)], order)


def mixed_root(order, germ):
    """Series root of the ``V0`` equation whose ``z`` coefficient is ``germ``."""
    phi = parse_in_unknown(M_ROOT_EQUATION, "V", "z", order, laurent=("w",))
    g = MultiPoly.monomial(1, {"w": int(germ.split("^")[1])}, laurent=("w",))
    return series_newton_root(phi, g, order)


def mixed_rational(V, order):
    num = parse_in_unknown(M_RATIONAL_NUM, "V", "z", order, laurent=("w",))
    den = parse_in_unknown(M_RATIONAL_DEN, "V", "z", order, laurent=("w",))
    return newton_residual(num, V) / newton_residual(den, V)


def verify_M(order=15, M=None):
    """Finds the admissible root ``V0`` and checks ``M(1,1) = R(z, V0)``.

    Each candidate germ is tried; a germ is rejected when it is not a
    root at order one or when ``R`` disagrees with the combinatorial series.
    """
    target = mixed_series(order, M)
    tried = {}
    winner = None
    residual = None
    for label, germ in M_ROOT_GERMS.items():
        try:
            V = mixed_root(order, germ)
        except SeriesError as exc:
            tried[label] = f"rejected: {exc}"
            continue
        res = target - mixed_rational(V, order)
        bad = first_discrepancy(res)
        tried[label] = "matches" if bad is None else f"mismatch at order {bad['order']}"
        if bad is None and winner is None:
            winner, residual = label, res
    if winner is None:
        return Report("M", order, False, {"order": None, "monomial": None,
                                          "coefficient": "no admissible germ"},
                      germs=tried)
    return _report("M", residual, germ=winner, germs=tried,
                   leading_terms=[str(c) for c in target.coeffs[:3]])


def verify_kernel_roots(order=10):
    """The closed-form lower kernel root and the germ of the mixed kernel root."""
    # the closed form annihilates the factor as a rational function:
    # clearing its denominator must leave the zero polynomial
    exact = (parse_poly("v*z^2-z^2+3*z-1") * parse_poly(LOWER_ROOT_NUM)
             + parse_poly("v*z^2+z") * parse_poly(LOWER_ROOT_DEN))
    phi = parse_in_unknown(LOWER_KERNEL_FACTOR, "u", "z", order)
    U0 = series_newton_root(phi, MultiPoly.const(1), order)
    closed = _z_expand(LOWER_ROOT_NUM, order) / _z_expand(LOWER_ROOT_DEN, order)
    lower_gap = first_discrepancy(U0 - closed)
    kphi = parse_in_unknown(MIXED_KERNEL, "u", "z", order)
    W = series_newton_root(kphi, MultiPoly.var("w"), order)
    kernel_gap = first_discrepancy(newton_residual(kphi, W))
    rho_ok = SINGULAR_POINT * (1 - SINGULAR_POINT) ** 3 == RHO
    passed = exact.is_zero() and lower_gap is None and kernel_gap is None and rho_ok
    bad = None
    if not exact.is_zero():
        bad = {"order": None, "monomial": "closed form", "coefficient": str(exact)}
    bad = bad or lower_gap or kernel_gap
    if not rho_ok:
        bad = {"order": None, "monomial": "rho", "coefficient": str(SINGULAR_POINT)}
    return Report("kernel_roots", order, passed, bad,
                  lower_root_terms=[str(c) for c in U0.coeffs[:3]],
                  mixed_root_terms=[str(c) for c in W.coeffs[:3]],
                  rho=str(RHO))


CHECKS = {
    "F": verify_F,
    "H": verify_H,
    "G": verify_G_annihilator,
    "M": verify_M,
    "kernels": verify_kernel_roots,
}
DEFAULT_ORDERS = {"F": 20, "H": 12, "G": 20, "M": 15, "kernels": 10}


def run_checks(names=None, orders=None):
    names = names or list(CHECKS)
    orders = {**DEFAULT_ORDERS, **(orders or {})}
    return [CHECKS[n](orders[n]) for n in names]
