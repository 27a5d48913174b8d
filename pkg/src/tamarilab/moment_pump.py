"""Limit moments from a linear recurrence on singular expansions.

Write ``f^(k)`` for the ``k``-th factorial-moment series of a statistic.
Its expansion at the dominant singularity ``rho`` starts with
``c_k * (1 - t/rho)**(alpha - beta*k)``.  When the moment series satisfy
``f^(k)/k! = sum_d h_d f^(k-d)/(k-d)!``, the leading constants obey
``c_k = sum_d a_d(k) c_(k-d)`` once ``k`` is past the initial range.  The
limit law of ``X_n / n**beta`` then has moments
``c_k Gamma(-alpha) / (c_0 Gamma(beta*k - alpha))``.

Constants live in ``Q(2^(1/4), 3^(1/4))`` and are handled exactly by
:class:`SymReal`; Gamma values are evaluated with mpmath.
"""

import ast
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

SHADOW_DPS = 50
COMPARE_DIGITS = 30
BASIS_PRIMES = (2, 3)
ROOT_DEGREE = 4


def _shadow_context():
    return mpmath.workdps(SHADOW_DPS)


class SymReal:
    """Exact element of ``Q(2^(1/4), 3^(1/4))``.

    Stored as ``{(i, j): q}`` meaning ``sum q * 2^(i/4) * 3^(j/4)`` with
    ``0 <= i, j < 4``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, q in (terms or {}).items():
            q = Fraction(q)
            if q:
                clean[key] = q
        self.terms = clean

    @classmethod
    def rational(cls, q):
        return cls({(0, 0): Fraction(q)})

    @classmethod
    def radical(cls, q, two_quarters=0, three_quarters=0):
        """``q * 2^(two_quarters/4) * 3^(three_quarters/4)``; any integer exponents."""
        q = Fraction(q)
        a, i = divmod(two_quarters, ROOT_DEGREE)
        b, j = divmod(three_quarters, ROOT_DEGREE)
        return cls({(i, j): q * Fraction(2) ** a * Fraction(3) ** b})

    @staticmethod
    def coerce(x):
        return x if isinstance(x, SymReal) else SymReal.rational(x)

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(k == (0, 0) for k in self.terms)

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms.get((0, 0), Fraction(0))

    def __add__(self, other):
        other = SymReal.coerce(other)
        out = dict(self.terms)
        for k, q in other.terms.items():
            out[k] = out.get(k, 0) + q
        return SymReal(out)

    __radd__ = __add__

    def __neg__(self):
        return SymReal({k: -q for k, q in self.terms.items()})

    def __sub__(self, other):
        return self + (-SymReal.coerce(other))

    def __rsub__(self, other):
        return SymReal.coerce(other) - self

    def __mul__(self, other):
        other = SymReal.coerce(other)
        out = {}
        for (i1, j1), q1 in self.terms.items():
            for (i2, j2), q2 in other.terms.items():
                a, i = divmod(i1 + i2, ROOT_DEGREE)
                b, j = divmod(j1 + j2, ROOT_DEGREE)
                out[(i, j)] = out.get((i, j), 0) + q1 * q2 * 2 ** a * 3 ** b
        return SymReal(out)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("SymReal division by zero")
        if len(self.terms) == 1:
            (i, j), q = next(iter(self.terms.items()))
            # 2^(i/4) * 2^((4-i)/4) = 2 when i > 0
            inv = SymReal.radical(1 / q, (-i) % 4, (-j) % 4)
            return inv * Fraction(1, (2 if i else 1) * (3 if j else 1))
        return _field_inverse(self)

    def __truediv__(self, other):
        return self * SymReal.coerce(other).inverse()

    def __rtruediv__(self, other):
        return SymReal.coerce(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            raise TypeError("SymReal powers must be integers")
        if k < 0:
            return self.inverse() ** (-k)
        result = SymReal.rational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymReal.rational(other)
        if not isinstance(other, SymReal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_mpf(self, dps=SHADOW_DPS):
        with mpmath.workdps(dps + 10):
            acc = mpmath.mpf(0)
            for (i, j), q in self.terms.items():
                acc += (mpmath.mpf(q.numerator) / q.denominator
                        * mpmath.root(2, 4) ** i * mpmath.root(3, 4) ** j)
            return +acc

    def __float__(self):
        return float(self.to_mpf(20))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), q in sorted(self.terms.items()):
            rad = _radical_str(i, j)
            if not rad:
                parts.append(str(q))
            elif q == 1:
                parts.append(rad)
            elif q == -1:
                parts.append("-" + rad)
            elif q.denominator == 1:
                parts.append(f"{q.numerator}*{rad}")
            else:
                parts.append(f"{q.numerator}*{rad}/{q.denominator}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"SymReal({self})"


def _radical_str(i, j):
    if i == j == 2:
        return "sqrt(6)"
    bits = []
    for base, e in ((2, i), (3, j)):
        if e == 2:
            bits.append(f"sqrt({base})")
        elif e:
            bits.append(f"{base}^({e}/4)")
    return "*".join(bits)


def _field_inverse(x):
    """Inverse through the multiplication matrix on the 16-element basis."""
    basis = [(i, j) for i in range(4) for j in range(4)]
    index = {b: n for n, b in enumerate(basis)}
    size = len(basis)
    # column n holds x * basis[n]; solve  M y = e_(0,0)
    mat = [[Fraction(0)] * (size + 1) for _ in range(size)]
    for n, b in enumerate(basis):
        prod = x * SymReal({b: 1})
        for k, q in prod.terms.items():
            mat[index[k]][n] = q
    mat[index[(0, 0)]][size] = Fraction(1)
    for col in range(size):
        pivot = next(r for r in range(col, size) if mat[r][col])
        mat[col], mat[pivot] = mat[pivot], mat[col]
        p = mat[col][col]
        mat[col] = [v / p for v in mat[col]]
        for r in range(size):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    return SymReal({b: mat[n][size] for n, b in enumerate(basis)})


class _Evaluator(ast.NodeVisitor):
    """Evaluates expressions over SymReal with variables bound to rationals."""

    def __init__(self, names):
        self.names = names

    def visit_Expression(self, node):
        return self.visit(node.body)

    def visit_Constant(self, node):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ValueError(f"unsupported constant {node.value!r}")
        return SymReal.rational(Fraction(str(node.value)))

    def visit_Name(self, node):
        if node.id not in self.names:
            raise ValueError(f"unknown name {node.id!r}")
        return SymReal.coerce(self.names[node.id])

    def visit_UnaryOp(self, node):
        v = self.visit(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ValueError("unsupported unary operator")

    def visit_BinOp(self, node):
        if isinstance(node.op, ast.Pow):
            return self._power(self.visit(node.left), self.visit(node.right))
        a, b = self.visit(node.left), self.visit(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        raise ValueError("unsupported operator")

    def visit_Call(self, node):
        if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1):
            raise ValueError("only sqrt(...) calls are supported")
        return self._power(self.visit(node.args[0]), SymReal.rational(Fraction(1, 2)))

    def generic_visit(self, node):
        raise ValueError(f"unsupported syntax {type(node).__name__}")

    @staticmethod
    def _power(base, exponent):
        e = exponent.rational_value()
        if e.denominator == 1:
            return base ** int(e)
        q = base.rational_value()
        if q <= 0:
            raise ValueError("fractional powers need a positive rational base")
        out = SymReal.rational(1)
        for part, sign in ((q.numerator, 1), (q.denominator, -1)):
            for p in BASIS_PRIMES:
                m = 0
                while part % p == 0:
                    part //= p
                    m += 1
                quarters = m * e * ROOT_DEGREE
                if quarters.denominator != 1:
                    raise ValueError(f"{q}^{e} is outside the radical field")
                kw = {"two_quarters" if p == 2 else "three_quarters": sign * int(quarters)}
                out = out * SymReal.radical(1, **kw)
            if part != 1:
                raise ValueError(f"{q}^{e} is outside the radical field")
        return out


def parse_symreal(text, **names):
    """Parse ``"-32*sqrt(6)/27"`` or ``"16/27*3^(3/4)*2^(1/4)"``; extra
    keyword arguments bind names (e.g. ``k``) to rationals."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")
    return _Evaluator(names).visit(tree)


# ---------------------------------------------------------------- specs


def last_initial_index(order, alpha, beta):
    """``L + max(floor(alpha/beta), -1)``."""
    ratio = Fraction(alpha) / Fraction(beta)
    return order + max(ratio.numerator // ratio.denominator, -1)


@dataclass
class PumpSpec:
    """Recurrence data for one statistic.

    ``coefficients`` maps ``d`` to the text of ``a_d(k)``; unlisted ``d``
    are zero.  ``pole_orders`` (optional) gives, in powers of
    ``(1 - t/rho)^(-1)``, the leading pole of each ``h_d``; it fixes the
    natural scaling exponent and lets :meth:`with_beta` handle other ones.
    """

    name: str
    order: int
    alpha: Fraction
    beta: Fraction
    rho: Fraction
    coefficients: dict
    initial: list
    pole_orders: list = field(default_factory=list)

    def __post_init__(self):
        self.alpha = Fraction(self.alpha)
        self.beta = Fraction(self.beta)
        self.rho = Fraction(self.rho)
        self.coefficients = {int(d): str(v) for d, v in self.coefficients.items()}
        self.initial = [c if isinstance(c, SymReal) else parse_symreal(str(c)) for c in self.initial]
        self.pole_orders = [Fraction(p) for p in self.pole_orders]
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.alpha.denominator == 1 and self.alpha >= 0:
            raise ValueError("alpha must not be a nonnegative integer")
        if not self.initial or self.initial[0].is_zero():
            raise ValueError("c_0 must be nonzero")
        if len(self.initial) != self.initial_count:
            raise ValueError(f"{self.name}: expected {self.initial_count} initial constants, "
                             f"got {len(self.initial)}")

    @property
    def last_initial(self):
        """Largest index whose constant is data rather than recurrence output."""
        return last_initial_index(self.order, self.alpha, self.beta)

    @property
    def initial_count(self):
        return self.last_initial + 1

    def natural_beta(self):
        if not self.pole_orders:
            return self.beta
        return max(p / d for d, p in enumerate(self.pole_orders, start=1))

    def a(self, d, k):
        text = self.coefficients.get(d)
        if text is None:
            return SymReal()
        return parse_symreal(text, k=Fraction(k))

    def with_beta(self, beta):
        """The same statistic scaled by ``n**beta``.

        A larger exponent than the natural one kills every coefficient and
        every initial constant past ``c_0``: all positive moments of the
        rescaled statistic tend to zero.
        """
        beta = Fraction(beta)
        natural = self.natural_beta()
        if beta < natural:
            raise ValueError(f"beta {beta} is below the natural exponent {natural}")
        if beta == natural:
            return PumpSpec(self.name, self.order, self.alpha, beta, self.rho,
                            dict(self.coefficients), list(self.initial), list(self.pole_orders))
        coeffs = {}
        for d, text in self.coefficients.items():
            if self.pole_orders and beta * d == self.pole_orders[d - 1]:
                coeffs[d] = text
        count = last_initial_index(self.order, self.alpha, beta) + 1
        initial = [self.initial[0]] + [SymReal()] * (count - 1)
        return PumpSpec(self.name, self.order, self.alpha, beta, self.rho, coeffs, initial,
                        list(self.pole_orders))

    def to_dict(self):
        return {"name": self.name, "order": self.order, "alpha": str(self.alpha),
                "beta": str(self.beta), "rho": str(self.rho),
                "coefficients": {str(d): v for d, v in sorted(self.coefficients.items())},
                "initial": [str(c) for c in self.initial],
                "pole_orders": [str(p) for p in self.pole_orders]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], int(d["order"]), Fraction(d["alpha"]), Fraction(d["beta"]),
                   Fraction(d["rho"]), d["coefficients"], d["initial"], d.get("pole_orders", []))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def pump(spec, k_max):
    """``c_0 .. c_k_max``: initial data, then the recurrence."""
    cs = list(spec.initial[:k_max + 1])
    for k in range(len(cs), k_max + 1):
        acc = SymReal()
        for d in range(1, spec.order + 1):
            if k - d >= 0 and d in spec.coefficients:
                acc = acc + spec.a(d, k) * cs[k - d]
        cs.append(acc)
    return cs


def _gamma(x):
    x = mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else x
    if x <= 0 and x == mpmath.floor(x):
        raise ValueError(f"Gamma pole at {x}")
    return mpmath.gamma(x)


def limit_moments(spec, k_max, cs=None):
    """Limits of ``E[X_n^k] / n^(beta k)`` for ``k <= k_max`` as 50-digit mpf.

    These are the factorial-moment limits; :func:`raw_from_factorial`
    shows the raw limits are the same because lower terms vanish.
    """
    cs = cs or pump(spec, k_max)
    with _shadow_context():
        g0 = _gamma(-spec.alpha)
        c0 = cs[0].to_mpf()
        return [cs[k].to_mpf() * g0 / (c0 * _gamma(spec.beta * k - spec.alpha))
                for k in range(k_max + 1)]


def stirling2(k):
    """Rows ``S(k, j)`` of the Stirling numbers of the second kind."""
    table = [[1]]
    for n in range(1, k + 1):
        prev = table[-1]
        row = [0] * (n + 1)
        for j in range(1, n + 1):
            row[j] = (prev[j - 1] if j - 1 < len(prev) else 0) + j * (prev[j] if j < len(prev) else 0)
        table.append(row)
    return table


def raw_from_factorial(factorial_moments):
    """``E[X^k] = sum_j S(k, j) E[(X)_j]`` for each ``k`` (exact if the input is)."""
    k_max = len(factorial_moments) - 1
    s = stirling2(k_max)
    return [sum(s[k][j] * factorial_moments[j] for j in range(k + 1)) for k in range(k_max + 1)]


def scaled_raw_limit(limits, beta, n):
    """Raw moments of ``X_n / n^beta`` rebuilt from factorial limits at a
    finite ``n``; the correction terms carry ``n^(beta (j - k))`` and vanish."""
    with _shadow_context():
        nn = mpmath.mpf(n)
        fact = [limits[j] * nn ** (beta * j) for j in range(len(limits))]
        raw = raw_from_factorial(fact)
        return [raw[k] / nn ** (beta * k) for k in range(len(limits))]


def predict_finite_n(spec, k, n, cs=None):
    """Leading-order ``[t^n] f^(k)``: ``c_k / Gamma(-alpha_k) n^(-1-alpha_k) rho^(-n)``."""
    cs = cs or pump(spec, k)
    with _shadow_context():
        ak = spec.alpha - spec.beta * k
        akf = mpmath.mpf(ak.numerator) / ak.denominator
        rho = mpmath.mpf(spec.rho.numerator) / spec.rho.denominator
        return cs[k].to_mpf() / _gamma(-ak) * mpmath.mpf(n) ** (-1 - akf) * rho ** (-n)


# ----------------------------------------------------------- instances


def dyck_instance():
    """Height of a uniform Dyck path at a uniform abscissa."""
    return PumpSpec("dyck", 2, Fraction(-1, 2), Fraction(1, 2), Fraction(1, 4),
                    {2: "k*(k-1)/4"}, ["2", "1"], pole_orders=[0, 1])


UPPER_INITIAL = [
    "-32*sqrt(6)/27",
    "16/27*3^(3/4)*2^(1/4)",
    "8/27",
    "5/54*3^(1/4)*2^(3/4)",
    "8*sqrt(6)/81",
    "385/2592*3^(3/4)*2^(1/4)",
    "70/81",
]

LOWER_INITIAL = [
    "-32*sqrt(6)/27",
    "16*3^(3/4)*2^(1/4)/81",
    "8/243",
    "5*2^(3/4)*3^(1/4)/1458",
    "8*sqrt(6)/6561",
    "385*3^(3/4)*2^(1/4)/629856",
    "70/59049",
    "85085*3^(1/4)*2^(3/4)/181398528",
    "700*sqrt(6)/1594323",
    "37182145*3^(3/4)*2^(1/4)/78364164096",
]

# leading pole orders of h_1 .. h_L in powers of (1 - t/rho)^(-1)
UPPER_POLES = [0, Fraction(6, 4), Fraction(6, 4)] + [Fraction(10, 4)] * 3
LOWER_POLES = [0, Fraction(6, 4), Fraction(6, 4)] + [Fraction(10, 4)] * 6


def upper_instance():
    """Upper-path height at a uniform abscissa of a uniform interval."""
    return PumpSpec("upper", 6, Fraction(1, 2), Fraction(3, 4), Fraction(27, 256),
                    {2: "sqrt(6)*(3*k-4)*(3*k-8)/96"}, UPPER_INITIAL, UPPER_POLES)


def lower_instance():
    """Lower-path height at a uniform abscissa of a uniform interval."""
    return PumpSpec("lower", 9, Fraction(1, 2), Fraction(3, 4), Fraction(27, 256),
                    {2: "sqrt(6)*(3*k-4)*(3*k-8)/864"}, LOWER_INITIAL, LOWER_POLES)


INSTANCES = {"dyck": dyck_instance, "upper": upper_instance, "lower": lower_instance}


def _pochhammer(x, m):
    out = Fraction(1)
    for i in range(m):
        out *= x + i
    return out


def upper_constant_closed(k):
    """Exact ``c_k`` of the upper instance from its Gamma-product closed form.

    ``16/27 Gamma(k/2+1/3) Gamma(k/2-1/3) sqrt(2) 4^(-k) 6^(3k/4) / pi``
    lies in the radical field: the Gamma product reduces by reflection to
    ``2 pi / sqrt(3)`` (even ``k``) or ``2 pi`` (odd ``k``) times rationals.
    """
    m, odd = divmod(k, 2)
    if odd:
        gammas = SymReal.rational(2 * _pochhammer(Fraction(5, 6), m) * _pochhammer(Fraction(1, 6), m))
    else:
        # Gamma(m+1/3) Gamma(m-1/3) = -3 (1/3)_m (-1/3)_m Gamma(1/3) Gamma(2/3)
        gammas = SymReal.radical(-3 * 2 * _pochhammer(Fraction(1, 3), m)
                                 * _pochhammer(Fraction(-1, 3), m), three_quarters=-2)
    return (Fraction(16, 27) * gammas * SymReal.radical(1, two_quarters=2)
            * Fraction(1, 4 ** k) * SymReal.radical(1, 3 * k, 3 * k))


def dyck_constant_closed(k):
    return SymReal.rational(Fraction(2 * factorial(k), 2 ** k))


def dyck_moment_series(k, order):
    """Exact ``[t^n]`` of the ``k``-th factorial-moment series of the Dyck
    height statistic, ``k! t^k C^(2k+2) / (1 - t C^2)^(k+1)`` with ``C`` the
    Catalan series; entry ``n`` sums over ``2n+1`` abscissas of all paths."""
    from .exactnum import TruncSeries
    from .tamari_core import catalan
    C = TruncSeries("t", order, [catalan(n) for n in range(order + 1)])
    t = TruncSeries.variable("t", order)
    C2 = C * C
    num = C2 ** (k + 1) * t ** k
    den = (TruncSeries.constant("t", order, 1) - t * C2) ** (k + 1)
    series = num / den * factorial(k)
    return [series[n].constant_value() for n in range(order + 1)]


def agree(a, b, digits=COMPARE_DIGITS):
    """Relative agreement of two mpf values to ``digits`` significant digits."""
    with _shadow_context():
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        scale = max(abs(a), abs(b), mpmath.mpf(10) ** (-SHADOW_DPS))
        return abs(a - b) <= scale * mpmath.mpf(10) ** (-digits)
