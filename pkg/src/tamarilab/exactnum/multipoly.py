"""Sparse polynomials in up to three named variables over the rationals.

Coefficients are Python ints or ``fractions.Fraction``; exponents are
stored as tuples aligned with ``vars``.  A variable listed in ``laurent``
may carry negative exponents, every other variable may not.
"""

from fractions import Fraction
from numbers import Rational

from .kronecker import kron_multiply

MAX_VARS = 3

# Fixed ranking so that two polynomials over the same names always agree on
# the tuple layout.  The jet variable r is last: it has the smallest extent
# and packs best in the least significant position.
VAR_ORDER = ("x", "y", "u", "v", "s", "w", "z", "t", "r")

# Above this many term pairs, integer products go through one big multiply.
KRONECKER_THRESHOLD = 4096


def _rank(name):
    try:
        return (VAR_ORDER.index(name), name)
    except ValueError:
        return (len(VAR_ORDER), name)


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class MultiPoly:
    """Immutable sparse polynomial, Laurent in opted-in variables."""

    __slots__ = ("vars", "terms", "laurent")

    def __init__(self, terms=None, vars=(), laurent=()):
        vars = tuple(vars)
        if len(vars) > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables, got {vars}")
        if list(vars) != sorted(vars, key=_rank) or len(set(vars)) != len(vars):
            raise ValueError(f"variables must be distinct and in canonical order: {vars}")
        laurent = frozenset(laurent)
        if not laurent <= set(vars):
            laurent = laurent & set(vars)
        clean = {}
        if terms:
            nv = len(vars)
            for expo, c in terms.items():
                if c == 0:
                    continue
                expo = tuple(expo)
                if len(expo) != nv:
                    raise ValueError("exponent tuple does not match variables")
                clean[expo] = _normalize(c)
            _check_exponents(clean, vars, laurent)
        self.vars = vars
        self.terms = clean
        self.laurent = laurent

    @classmethod
    def _raw(cls, terms, vars, laurent):
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj.laurent = laurent
        return obj

    # construction helpers

    @classmethod
    def const(cls, c):
        if isinstance(c, MultiPoly):
            return c
        if not isinstance(c, (int, Rational)):
            raise TypeError(f"not an exact scalar: {c!r}")
        return cls._raw({(): _normalize(c)} if c != 0 else {}, (), frozenset())

    @classmethod
    def var(cls, name, laurent=False):
        return cls._raw({(1,): 1}, (name,), frozenset([name]) if laurent else frozenset())

    @classmethod
    def monomial(cls, coeff, powers, laurent=()):
        """``coeff * prod(name**e)`` for a mapping ``powers``."""
        names = tuple(sorted(powers, key=_rank))
        expo = tuple(powers[n] for n in names)
        return cls({expo: coeff}, names, laurent)

    @classmethod
    def from_univariate(cls, coeffs, name, low=0, laurent=False):
        """Polynomial ``sum(coeffs[i] * name**(low+i))``."""
        terms = {(low + i,): c for i, c in enumerate(coeffs) if c != 0}
        return cls(terms, (name,), [name] if laurent else ())

    # alignment

    def with_vars(self, vars, laurent=None):
        """Re-express over a superset of variables (canonical order)."""
        vars = tuple(vars)
        lau = self.laurent if laurent is None else frozenset(laurent) | self.laurent
        if vars == self.vars:
            if lau == self.laurent:
                return self
            return MultiPoly._raw(self.terms, vars, lau)
        for name in self.vars:
            if name not in vars:
                raise ValueError(f"cannot drop variable {name}")
        index = {n: i for i, n in enumerate(self.vars)}
        pos = [index.get(n) for n in vars]
        terms = {}
        for expo, c in self.terms.items():
            terms[tuple(0 if p is None else expo[p] for p in pos)] = c
        if len(vars) > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables, got {vars}")
        return MultiPoly._raw(terms, vars, lau)

    def declare_laurent(self, name):
        vars = self.vars if name in self.vars else tuple(sorted(self.vars + (name,), key=_rank))
        return self.with_vars(vars, self.laurent | {name})

    @staticmethod
    def unify(a, b):
        if a.vars == b.vars:
            if a.laurent == b.laurent:
                return a, b
            lau = a.laurent | b.laurent
            return MultiPoly._raw(a.terms, a.vars, lau), MultiPoly._raw(b.terms, b.vars, lau)
        vars = tuple(sorted(set(a.vars) | set(b.vars), key=_rank))
        lau = a.laurent | b.laurent
        return a.with_vars(vars, lau), b.with_vars(vars, lau)

    def drop_unused(self):
        """Remove variables that appear with exponent zero everywhere."""
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        vars = tuple(self.vars[i] for i in used)
        terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return MultiPoly._raw(terms, vars, self.laurent & set(vars))

    # predicates and accessors

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The scalar value of a constant polynomial."""
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        for c in self.terms.values():
            return c
        return 0

    def constant_term(self):
        zero = (0,) * len(self.vars)
        return self.terms.get(zero, 0)

    def is_integral(self):
        return all(isinstance(c, int) for c in self.terms.values())

    def __len__(self):
        return len(self.terms)

    def _index(self, name):
        try:
            return self.vars.index(name)
        except ValueError:
            return None

    def degree(self, name):
        i = self._index(name)
        if i is None or not self.terms:
            return 0 if self.terms else -1
        return max(e[i] for e in self.terms)

    def low_degree(self, name):
        i = self._index(name)
        if i is None or not self.terms:
            return 0
        return min(e[i] for e in self.terms)

    def coeff(self, name, k):
        """Coefficient of ``name**k``; the variable is kept with exponent 0."""
        i = self._index(name)
        if i is None:
            return self if k == 0 else MultiPoly._raw({}, self.vars, self.laurent)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                terms[e[:i] + (0,) + e[i + 1:]] = c
        return MultiPoly._raw(terms, self.vars, self.laurent)

    def coefficient_of(self, powers):
        """Scalar coefficient of the monomial described by ``powers``."""
        expo = tuple(powers.get(n, 0) for n in self.vars)
        for n, e in powers.items():
            if n not in self.vars and e != 0:
                return 0
        return self.terms.get(expo, 0)

    def as_dict(self):
        """``{monomial string: coefficient}`` for reports."""
        return {monomial_str(self.vars, e): c for e, c in sorted(self.terms.items())}

    # ring operations

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self.terms.items()}, self.vars, self.laurent)

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            if other == 0:
                return self
            other = MultiPoly.const(other)
        a, b = MultiPoly.unify(self, other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _normalize(v)
            else:
                terms.pop(e, None)
        return MultiPoly._raw(terms, a.vars, a.laurent)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if c == 0:
            return MultiPoly._raw({}, self.vars, self.laurent)
        if c == 1:
            return self
        return MultiPoly._raw({e: _normalize(v * c) for e, v in self.terms.items()},
                              self.vars, self.laurent)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        a, b = MultiPoly.unify(self, other)
        if not a.terms or not b.terms:
            return MultiPoly._raw({}, a.vars, a.laurent)
        if (len(a.terms) * len(b.terms) > KRONECKER_THRESHOLD
                and a.is_integral() and b.is_integral()):
            terms = kron_multiply(a.terms, b.terms, len(a.vars))
            return MultiPoly._raw(terms, a.vars, a.laurent)
        terms = {}
        get = terms.get
        if len(a.vars) == 1:
            for (e1,), c1 in a.terms.items():
                for (e2,), c2 in b.terms.items():
                    k = (e1 + e2,)
                    terms[k] = get(k, 0) + c1 * c2
        else:
            for e1, c1 in a.terms.items():
                for e2, c2 in b.terms.items():
                    k = tuple(x + y for x, y in zip(e1, e2))
                    terms[k] = get(k, 0) + c1 * c2
        terms = {e: _normalize(c) for e, c in terms.items() if c != 0}
        return MultiPoly._raw(terms, a.vars, a.laurent)

    __rmul__ = __mul__

    def is_unit(self):
        """True for a single term whose variables may all go negative."""
        if len(self.terms) != 1:
            return False
        (e, c), = self.terms.items()
        return all(k == 0 or name in self.laurent for k, name in zip(e, self.vars))

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError(f"not a unit: {self}")
        (e, c), = self.terms.items()
        return MultiPoly._raw({tuple(-k for k in e): _normalize(Fraction(1) / c)},
                              self.vars, self.laurent)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = MultiPoly.const(1).with_vars(self.vars, self.laurent)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        """Division by a scalar or by a unit monomial."""
        if isinstance(other, MultiPoly):
            if other.is_constant() and other.terms:
                return self.scale(Fraction(1) / Fraction(other.constant_value()))
            return self * other.inverse()
        return self.scale(Fraction(1) / Fraction(other))

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Rational)):
                other = MultiPoly.const(other)
            else:
                return NotImplemented
        a, b = MultiPoly.unify(self, other)
        return a.terms == b.terms

    def __hash__(self):
        p = self.drop_unused()
        return hash((p.vars, frozenset(p.terms.items())))

    # calculus and substitution

    def derivative(self, name, times=1):
        i = self._index(name)
        if i is None:
            return MultiPoly._raw({}, self.vars, self.laurent)
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            f = 1
            for j in range(times):
                f *= k - j
            if f:
                terms[e[:i] + (k - times,) + e[i + 1:]] = c * f
        return MultiPoly._raw(terms, self.vars, self.laurent)

    def subs(self, name, value):
        """Substitute a scalar or a polynomial for one variable."""
        i = self._index(name)
        if i is None:
            return self
        if isinstance(value, MultiPoly):
            return self._subs_poly(i, value)
        keep = self.vars[:i] + self.vars[i + 1:]
        terms = {}
        for e, c in self.terms.items():
            k = e[:i] + e[i + 1:]
            if e[i] < 0:
                v = c * Fraction(1) / Fraction(value) ** (-e[i])
            else:
                v = c * value ** e[i]
            terms[k] = terms.get(k, 0) + v
        terms = {e: _normalize(c) for e, c in terms.items() if c != 0}
        return MultiPoly._raw(terms, keep, self.laurent - {name})

    def _subs_poly(self, i, value):
        name = self.vars[i]
        keep = self.vars[:i] + self.vars[i + 1:]
        lau = self.laurent - {name}
        groups = {}
        for e, c in self.terms.items():
            groups.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        out = MultiPoly._raw({}, keep, lau)
        for k, terms in groups.items():
            out = out + MultiPoly._raw(terms, keep, lau) * value ** k
        return out

    def evaluate(self, assignment):
        """Substitute several scalars given as ``{name: value}``."""
        p = self
        for name, value in assignment.items():
            p = p.subs(name, value)
        return p

    def rename(self, mapping):
        names = tuple(mapping.get(n, n) for n in self.vars)
        order = sorted(range(len(names)), key=lambda j: _rank(names[j]))
        vars = tuple(names[j] for j in order)
        terms = {tuple(e[j] for j in order): c for e, c in self.terms.items()}
        lau = frozenset(mapping.get(n, n) for n in self.laurent)
        return MultiPoly(terms, vars, lau)

    def truncate(self, name, max_degree):
        """Drop every term whose exponent in ``name`` exceeds ``max_degree``."""
        i = self._index(name)
        if i is None:
            return self
        return MultiPoly._raw({e: c for e, c in self.terms.items() if e[i] <= max_degree},
                              self.vars, self.laurent)

    def div_var_minus_one(self, name):
        """Exact quotient by ``(name - 1)``; a nonzero remainder raises."""
        i = self._index(name)
        if i is None:
            if self.terms:
                raise ArithmeticError(f"division by {name}-1 is not exact")
            return self
        if name in self.laurent and self.low_degree(name) < 0:
            raise ValueError(f"Laurent input in {name}")
        groups = {}
        for e, c in self.terms.items():
            groups.setdefault(e[:i] + e[i + 1:], {})[e[i]] = c
        terms = {}
        for rest, row in groups.items():
            top = max(row)
            acc = 0
            # synthetic division from the top coefficient down
            for k in range(top, 0, -1):
                acc += row.get(k, 0)
                if acc:
                    terms[rest[:i] + (k - 1,) + rest[i:]] = acc
            if acc + row.get(0, 0) != 0:
                raise ArithmeticError(f"division by {name}-1 leaves a remainder")
        return MultiPoly._raw({e: _normalize(c) for e, c in terms.items()},
                              self.vars, self.laurent)

    def divided_difference(self, name):
        """``name * (p - p|name=1) / (name - 1)``, computed exactly."""
        if name in self.laurent and self.low_degree(name) < 0:
            raise ValueError(f"Laurent input in {name}")
        at_one = self.subs(name, 1).with_vars(self.vars, self.laurent)
        q = (self - at_one).div_var_minus_one(name)
        return q * MultiPoly.var(name)

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = monomial_str(self.vars, e)
            if mono == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def monomial_str(vars, expo):
    bits = []
    for n, e in zip(vars, expo):
        if e == 1:
            bits.append(n)
        elif e:
            bits.append(f"{n}^{e}")
    return "*".join(bits) if bits else "1"


def _check_exponents(terms, vars, laurent):
    for i, name in enumerate(vars):
        if name in laurent:
            continue
        for e in terms:
            if e[i] < 0:
                raise ValueError(f"negative exponent in non-Laurent variable {name}")


def poly(expr_terms, vars, laurent=()):
    """Convenience: build from ``{exponent tuple: coeff}`` with unsorted names."""
    names = tuple(vars)
    order = sorted(range(len(names)), key=lambda j: _rank(names[j]))
    terms = {tuple(e[j] for j in order): c for e, c in expr_terms.items()}
    return MultiPoly(terms, tuple(names[j] for j in order), laurent)


def parse_terms(text):
    """Read a polynomial written with ``+ - * ^`` and integer literals.

    Only the arithmetic tree is evaluated (through ``ast``), so the input
    can be copied from printed formulas such as ``"u^2*v^2*w*z^4+u"``.
    Returns ``{((name, exponent), ...): coeff}`` with any number of
    variables; negative integer powers are kept as negative exponents.
    """
    import ast

    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def mul(a, b):
        out = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                d = dict(ka)
                for n, e in kb:
                    d[n] = d.get(n, 0) + e
                key = tuple(sorted((n, e) for n, e in d.items() if e))
                out[key] = out.get(key, 0) + ca * cb
        return {k: c for k, c in out.items() if c}

    def add(a, b, sign=1):
        out = dict(a)
        for k, c in b.items():
            out[k] = out.get(k, 0) + sign * c
        return {k: c for k, c in out.items() if c}

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return {(): node.value} if node.value else {}
        if isinstance(node, ast.Name):
            return {((node.id, 1),): 1}
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return {k: -c for k, c in v.items()} if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            left = walk(node.left)
            if isinstance(node.op, ast.Pow):
                k = node.right
                sign = 1
                if isinstance(k, ast.UnaryOp) and isinstance(k.op, ast.USub):
                    sign, k = -1, k.operand
                if not (isinstance(k, ast.Constant) and isinstance(k.value, int)):
                    raise ValueError("exponents must be integer literals")
                k = sign * k.value
                if k < 0:
                    if len(left) != 1:
                        raise ValueError("negative powers only of monomials")
                    (key, c), = left.items()
                    if c not in (1, -1):
                        raise ValueError("negative powers only of unit monomials")
                    return {tuple((n, e * k) for n, e in key): c ** k}
                out = {(): 1}
                for _ in range(k):
                    out = mul(out, left)
                return out
            right = walk(node.right)
            if isinstance(node.op, ast.Add):
                return add(left, right)
            if isinstance(node.op, ast.Sub):
                return add(left, right, -1)
            if isinstance(node.op, ast.Mult):
                return mul(left, right)
            if isinstance(node.op, ast.Div) and set(right) <= {()}:
                d = right.get((), 0)
                return {k: Fraction(c) / d for k, c in left.items()}
        raise ValueError(f"unsupported syntax in polynomial: {ast.dump(node)}")

    return walk(tree)


def terms_to_poly(terms, laurent=(), names=None):
    """Convert a ``parse_terms`` mapping into a ``MultiPoly``."""
    used = set(names or ())
    for key in terms:
        used.update(n for n, _ in key)
    vars = tuple(sorted(used, key=_rank))
    out = {}
    for key, c in terms.items():
        d = dict(key)
        out[tuple(d.get(n, 0) for n in vars)] = c
    return MultiPoly(out, vars, laurent)


def parse_poly(text, laurent=()):
    """Parse a polynomial in at most three variables."""
    return terms_to_poly(parse_terms(text), laurent)
