"""Truncated power series whose coefficients are ``MultiPoly`` values.

A series knows its main variable and its truncation order ``N``: it stores
the coefficients of ``var**0 .. var**N`` and nothing beyond.  Every binary
operation returns a series truncated at the smaller of the two orders.
"""

from fractions import Fraction

from .multipoly import MultiPoly, parse_terms, terms_to_poly


def _coerce(c):
    if isinstance(c, MultiPoly):
        return c
    return MultiPoly.const(c)


class SeriesError(ValueError):
    pass


class TruncSeries:
    """Immutable power series in ``var`` known modulo ``var**(order+1)``."""

    __slots__ = ("var", "order", "coeffs")

    def __init__(self, var, order, coeffs):
        if order < 0:
            raise SeriesError("truncation order must be nonnegative")
        cs = [_coerce(c) for c in list(coeffs)[:order + 1]]
        zero = MultiPoly.const(0)
        cs.extend(zero for _ in range(order + 1 - len(cs)))
        self.var = var
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, var, order, coeffs):
        obj = cls.__new__(cls)
        obj.var = var
        obj.order = order
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def constant(cls, var, order, c=1):
        return cls(var, order, [c])

    @classmethod
    def variable(cls, var, order):
        """The series ``var`` itself."""
        return cls(var, order, [0, 1])

    @classmethod
    def from_poly(cls, p, var, order):
        """Split a ``MultiPoly`` in ``var`` into a series in ``var``."""
        p = _coerce(p)
        if var not in p.vars:
            return cls(var, order, [p])
        i = p.vars.index(var)
        keep = p.vars[:i] + p.vars[i + 1:]
        rows = [dict() for _ in range(order + 1)]
        for e, c in p.terms.items():
            k = e[i]
            if k < 0:
                raise SeriesError(f"negative power of {var}")
            if k <= order:
                rows[k][e[:i] + e[i + 1:]] = c
        lau = p.laurent - {var}
        return cls._raw(var, order, [MultiPoly._raw(r, keep, lau) for r in rows])

    def _check(self, other):
        if other.var != self.var:
            raise SeriesError(f"variable mismatch: {self.var} vs {other.var}")

    def __getitem__(self, k):
        return self.coeffs[k]

    def truncate(self, order):
        order = min(order, self.order)
        return TruncSeries._raw(self.var, order, self.coeffs[:order + 1])

    def valuation(self):
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return self.order + 1

    def is_zero(self):
        return all(not c for c in self.coeffs)

    def first_nonzero(self):
        """``(order, coefficient)`` of the lowest nonzero term, or None."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k, c
        return None

    def map(self, fn):
        return TruncSeries._raw(self.var, self.order, [_coerce(fn(c)) for c in self.coeffs])

    def __neg__(self):
        return self.map(lambda c: -c)

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.var, self.order, other)
        self._check(other)
        n = min(self.order, other.order)
        return TruncSeries._raw(self.var, n, [self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(self.var, self.order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            c = _coerce(other)
            return self.map(lambda a: a * c)
        self._check(other)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        nza = [k for k in range(n + 1) if a[k]]
        nzb = [k for k in range(n + 1) if b[k]]
        out = [MultiPoly.const(0)] * (n + 1)
        for i in nza:
            for j in nzb:
                if i + j > n:
                    break
                out[i + j] = out[i + j] + a[i] * b[j]
        return TruncSeries._raw(self.var, n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries.constant(self.var, self.order, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k):
        """Multiply by ``var**k`` (``k`` may be negative if the low terms vanish)."""
        if k >= 0:
            return TruncSeries._raw(self.var, self.order,
                                    [MultiPoly.const(0)] * k + list(self.coeffs[:self.order + 1 - k]))
        if any(self.coeffs[:-k]):
            raise SeriesError(f"cannot divide by {self.var}^{-k}: low terms nonzero")
        # dividing by var^k loses k orders of known precision
        return TruncSeries._raw(self.var, self.order + k, self.coeffs[-k:])

    def inverse(self):
        """Multiplicative inverse; the constant coefficient must be a unit."""
        a0 = self.coeffs[0]
        if not a0.is_unit():
            raise SeriesError(f"constant coefficient {a0} is not a unit")
        inv0 = a0.inverse()
        n = self.order
        out = [inv0]
        for m in range(1, n + 1):
            acc = MultiPoly.const(0)
            for k in range(1, m + 1):
                if self.coeffs[k]:
                    acc = acc + self.coeffs[k] * out[m - k]
            out.append(-(acc * inv0))
        return TruncSeries._raw(self.var, n, out)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        c = _coerce(other)
        return self.map(lambda a: a / c)

    def compose(self, g):
        """``self(g)`` where ``g`` has zero constant term.

        The result lives in ``g``'s variable; its order is the smaller of
        the two orders, since ``g`` has valuation at least one.
        """
        if g.coeffs[0]:
            raise SeriesError("inner series has a nonzero constant term")
        n = min(self.order, g.order)
        g = g.truncate(n)
        result = TruncSeries.constant(g.var, n, self.coeffs[n])
        for k in range(n - 1, -1, -1):
            result = result * g + self.coeffs[k]
        return result

    def derivative(self):
        """Formal derivative in the main variable (one order is lost)."""
        if self.order == 0:
            return TruncSeries(self.var, 0, [0])
        return TruncSeries._raw(self.var, self.order - 1,
                                [self.coeffs[k] * k for k in range(1, self.order + 1)])

    def subs(self, name, value):
        """Substitute into every coefficient."""
        return self.map(lambda c: c.subs(name, value))

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return self.var == other.var and all(self.coeffs[k] == other.coeffs[k] for k in range(n + 1))

    __hash__ = None

    def __repr__(self):
        body = " + ".join(f"({c})*{self.var}^{k}" for k, c in enumerate(self.coeffs) if c)
        return f"TruncSeries[{self.var}, O({self.var}^{self.order + 1})]({body or '0'})"


def substitute_series(p, name, s):
    """Replace the variable ``name`` of a polynomial by the series ``s``.

    The remaining variables of ``p`` stay in the coefficients.  Negative
    powers are allowed when ``s`` is invertible.
    """
    p = _coerce(p)
    if name not in p.vars:
        return TruncSeries(s.var, s.order, [p])
    i = p.vars.index(name)
    keep = p.vars[:i] + p.vars[i + 1:]
    lau = p.laurent - {name}
    groups = {}
    for e, c in p.terms.items():
        groups.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
    powers = {}
    result = TruncSeries.constant(s.var, s.order, 0)
    hi = max(groups) if groups else 0
    lo = min(groups) if groups else 0
    if hi > 0:
        cur = TruncSeries.constant(s.var, s.order, 1)
        for k in range(1, hi + 1):
            cur = cur * s
            powers[k] = cur
    if lo < 0:
        inv = s.inverse()
        cur = TruncSeries.constant(s.var, s.order, 1)
        for k in range(1, -lo + 1):
            cur = cur * inv
            powers[-k] = cur
    for k, terms in groups.items():
        c = MultiPoly._raw(terms, keep, lau)
        if k == 0:
            result = result + TruncSeries(s.var, s.order, [c])
        else:
            result = result + powers[k] * c
    return result


def parse_series(text, var, order, laurent=()):
    """Parse a printed polynomial and expand it as a series in ``var``."""
    return parse_in_unknown(text, None, var, order, laurent)[0]


def parse_in_unknown(text, unknown, var, order, laurent=()):
    """Coefficient series of a printed polynomial, by powers of ``unknown``.

    ``parse_in_unknown("u*z + u^2 - z", "u", "z", 5)`` gives the series
    coefficients of ``u**0, u**1, u**2``.  Used to feed printed kernels and
    annihilators to :func:`series_newton_root`.
    """
    terms = parse_terms(text)
    buckets = {}
    for key, c in terms.items():
        d = dict(key)
        k = d.pop(unknown, 0) if unknown else 0
        if k < 0:
            raise SeriesError(f"negative power of the unknown {unknown}")
        buckets.setdefault(k, {})[tuple(sorted(d.items()))] = c
    top = max(buckets) if buckets else 0
    out = []
    for k in range(top + 1):
        p = terms_to_poly(buckets.get(k, {}), laurent)
        out.append(TruncSeries.from_poly(p, var, order))
    return out


def series_newton_root(phi, germ, order):
    """Series root ``W`` of ``sum(phi[i] * W**i) = 0`` with a prescribed germ.

    ``phi`` lists the coefficients of the unknown as ``TruncSeries`` (or
    polynomials, which are expanded in the series variable).  ``germ`` is
    the root modulo ``var**2``, either a series or the polynomial
    coefficient of ``var**1``.  The germ must annihilate ``phi`` through
    order one and the derivative at the germ must have a unit constant
    coefficient; each Newton step then doubles the number of correct terms.
    """
    var = None
    for c in phi:
        if isinstance(c, TruncSeries):
            var = c.var
            break
    if var is None:
        raise SeriesError("phi needs at least one series coefficient to fix the variable")
    phi = [c if isinstance(c, TruncSeries) else TruncSeries.from_poly(c, var, order) for c in phi]
    for c in phi:
        if c.order < order:
            raise SeriesError(f"coefficient known only to order {c.order} < {order}")
    if not isinstance(germ, TruncSeries):
        germ = TruncSeries(var, 1, [0, germ])
    germ = germ.truncate(1)
    dphi = [c * i for i, c in enumerate(phi)][1:]

    def evaluate(coeffs, w, n):
        acc = coeffs[-1].truncate(n)
        for c in reversed(coeffs[:-1]):
            acc = acc * w + c.truncate(n)
        return acc

    head = evaluate(phi, germ, min(order, 1))
    if not head.is_zero():
        raise SeriesError(f"germ does not annihilate the equation at order 1: residual {head!r}")
    slope = evaluate(dphi, germ, 0)
    if not slope.coeffs[0].is_unit():
        raise SeriesError(f"derivative at the germ is not a unit: {slope.coeffs[0]}")

    w = TruncSeries(var, min(order, 1), germ.coeffs)
    prec = 1
    while prec < order:
        prec = min(2 * prec + 1, order)
        wp = TruncSeries(var, prec, w.coeffs)
        value = evaluate(phi, wp, prec)
        deriv = evaluate(dphi, wp, prec)
        w = wp - value * deriv.inverse()
    return TruncSeries(var, order, w.coeffs)


def newton_residual(phi, root):
    """``sum(phi[i] * root**i)`` truncated at the root's order."""
    n = root.order
    acc = None
    for c in reversed(phi):
        c = c if isinstance(c, TruncSeries) else TruncSeries.from_poly(c, root.var, n)
        c = c.truncate(n)
        acc = c if acc is None else acc * root + c
    return acc


def exact_fraction(c):
    """Scalar value of a constant coefficient as a Fraction."""
    return Fraction(_coerce(c).constant_value())
