"""Kronecker substitution for exact multivariate integer polynomials.

A polynomial with integer coefficients is packed into a single big integer
by giving every exponent tuple a slot of ``bits`` bits.  Multiplying two
packed integers then multiplies the polynomials, provided the slots are wide
enough that no coefficient of the product overflows its slot, and the
strides are wide enough that no exponent wraps into the next row.

Signed coefficients are supported: packing subtracts the packed negative
part from the packed positive part, and unpacking adds a bias of
``2**(bits-1)`` to every slot before splitting the byte string.
"""

import numpy as np

try:  # GMP multiplication is much faster than CPython's Karatsuba at these sizes
    import gmpy2

    def _bigmul(a, b):
        return int(gmpy2.mpz(a) * gmpy2.mpz(b))

except ImportError:  # pragma: no cover
    gmpy2 = None

    def _bigmul(a, b):
        return a * b


class KroneckerLayout:
    """Slot layout for exponent tuples inside a fixed box.

    ``lows`` are the smallest exponents that can occur in any packed
    operand or product (they may be negative for Laurent variables),
    ``extents`` the number of distinct exponents per variable.  The last
    variable varies fastest.
    """

    def __init__(self, lows, extents, bits):
        self.lows = tuple(lows)
        self.extents = tuple(extents)
        nbytes = max(1, (bits + 7) // 8)
        self.nbytes = nbytes
        self.bits = 8 * nbytes
        strides = []
        acc = 1
        for e in reversed(self.extents):
            strides.append(acc)
            acc *= e
        self.strides = tuple(reversed(strides))
        self.size = acc

    def index(self, expo):
        return sum((e - lo) * s for e, lo, s in zip(expo, self.lows, self.strides))

    def _pack_unsigned(self, items):
        # items: iterable of (slot index, nonnegative int)
        nb = self.nbytes
        top = 0
        chunks = []
        for idx, c in items:
            chunks.append((idx, c))
            if idx > top:
                top = idx
        if not chunks:
            return 0
        buf = bytearray((top + 1) * nb)
        for idx, c in chunks:
            buf[idx * nb:(idx + 1) * nb] = c.to_bytes(nb, "little")
        return int.from_bytes(buf, "little")

    def pack(self, terms, lows=None):
        """Pack a ``{exponent tuple: int}`` mapping.

        ``lows`` shifts the exponents before indexing; operands of a product
        are packed with their own minimal exponents so that the product
        lands at ``operand_lows_a + operand_lows_b``.
        """
        lows = self.lows if lows is None else lows
        strides = self.strides
        pos = []
        neg = []
        for expo, c in terms.items():
            idx = 0
            for e, lo, s in zip(expo, lows, strides):
                idx += (e - lo) * s
            if c > 0:
                pos.append((idx, c))
            elif c < 0:
                neg.append((idx, -c))
        value = self._pack_unsigned(pos)
        if neg:
            value -= self._pack_unsigned(neg)
        return value

    def unpack(self, value, signed=True):
        """Inverse of :meth:`pack` for the layout's own ``lows``."""
        if value == 0:
            return {}
        nb = self.nbytes
        half = 1 << (self.bits - 1)
        if signed:
            nslots = self.size
            bias = int.from_bytes((b"\x00" * (nb - 1) + b"\x80") * nslots, "little")
            raw = (value + bias).to_bytes(nslots * nb, "little")
            arr = np.frombuffer(raw, dtype=np.uint8).reshape(nslots, nb)
            pattern = np.zeros(nb, dtype=np.uint8)
            pattern[-1] = 0x80
            hits = np.nonzero((arr != pattern).any(axis=1))[0]
        else:
            if value < 0:
                raise ValueError("negative packed value in unsigned unpack")
            nslots = (value.bit_length() + self.bits - 1) // self.bits
            raw = value.to_bytes(nslots * nb, "little")
            arr = np.frombuffer(raw, dtype=np.uint8).reshape(nslots, nb)
            hits = np.nonzero(arr.any(axis=1))[0]
        out = {}
        strides = self.strides
        lows = self.lows
        for idx in hits.tolist():
            c = int.from_bytes(raw[idx * nb:(idx + 1) * nb], "little")
            if signed:
                c -= half
                if c == 0:
                    continue
            expo = []
            rem = idx
            for s, lo in zip(strides, lows):
                q, rem = divmod(rem, s)
                expo.append(q + lo)
            out[tuple(expo)] = c
        return out


def _box(terms, nvars):
    lo = [None] * nvars
    hi = [None] * nvars
    for expo in terms:
        for i, e in enumerate(expo):
            if lo[i] is None or e < lo[i]:
                lo[i] = e
            if hi[i] is None or e > hi[i]:
                hi[i] = e
    return lo, hi


def _abs_stats(terms):
    tot = 0
    mx = 0
    for c in terms.values():
        a = -c if c < 0 else c
        tot += a
        if a > mx:
            mx = a
    return tot, mx


def kron_multiply(a, b, nvars):
    """Product of two ``{exponent: int}`` maps via one big-integer multiply."""
    if not a or not b:
        return {}
    alo, ahi = _box(a, nvars)
    blo, bhi = _box(b, nvars)
    lows = [x + y for x, y in zip(alo, blo)]
    extents = [(ah - al) + (bh - bl) + 1 for al, ah, bl, bh in zip(alo, ahi, blo, bhi)]
    asum, amax = _abs_stats(a)
    bsum, bmax = _abs_stats(b)
    bound = min(asum * bmax, bsum * amax)
    signed = any(c < 0 for c in a.values()) or any(c < 0 for c in b.values())
    layout = KroneckerLayout(lows, extents, bound.bit_length() + 2)
    pa = layout.pack(a, alo)
    pb = layout.pack(b, blo)
    return layout.unpack(_bigmul(pa, pb), signed=signed)


def kron_sum_of_products(pairs, nvars):
    """``sum(p * q for p, q in pairs)`` with a single unpack at the end.

    Every operand is packed once into a shared layout covering all the
    products; the packed products are added as big integers.
    """
    pairs = [(p, q) for p, q in pairs if p and q]
    if not pairs:
        return {}
    lows = None
    highs = None
    boxes = []
    bound = 0
    signed = False
    for p, q in pairs:
        plo, phi = _box(p, nvars)
        qlo, qhi = _box(q, nvars)
        boxes.append((plo, qlo))
        lo = [x + y for x, y in zip(plo, qlo)]
        hi = [x + y for x, y in zip(phi, qhi)]
        if lows is None:
            lows, highs = lo, hi
        else:
            lows = [min(x, y) for x, y in zip(lows, lo)]
            highs = [max(x, y) for x, y in zip(highs, hi)]
        psum, pmax = _abs_stats(p)
        qsum, qmax = _abs_stats(q)
        bound += min(psum * qmax, qsum * pmax)
        if not signed:
            signed = any(c < 0 for c in p.values()) or any(c < 0 for c in q.values())
    extents = [h - l + 1 for l, h in zip(lows, highs)]
    layout = KroneckerLayout(lows, extents, bound.bit_length() + 2)
    total = 0
    for (p, q), (plo, qlo) in zip(pairs, boxes):
        # place p at its own low corner shifted so that p*q lands correctly
        shift = [pl + ql - l for pl, ql, l in zip(plo, qlo, lows)]
        p_lows = [pl - s for pl, s in zip(plo, shift)]
        total += _bigmul(layout.pack(p, p_lows), layout.pack(q, qlo))
    return layout.unpack(total, signed=signed)
