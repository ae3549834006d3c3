"""Bilinear group context: elements, counters, exponentiation, pairing.

The context wraps the BLS12-381 backend behind a small Type-3 group API.
All operations are pure; the only mutable state is the operation counter,
which uses a lock so concurrent measurements stay exact.
"""

import threading

from gmpy2 import mpz

from . import encoding as enc
from . import fields as F
from .curve import CURVE_G1, CURVE_G2, G1_GEN, G2_GEN, R
from .pairing import final_exponentiation, miller_loop

G1, G2, GT = 1, 2, "T"

_WINDOW = 4


class OpCounter:
    """Counts exponentiations per group and pairing evaluations."""

    def __init__(self):
        self._lock = threading.Lock()
        self.reset()

    def reset(self):
        with self._lock:
            self.exp_g1 = 0
            self.exp_g2 = 0
            self.exp_gt = 0
            self.pairings = 0

    def add_exp(self, group, k=1):
        with self._lock:
            if group == G1:
                self.exp_g1 += k
            elif group == G2:
                self.exp_g2 += k
            else:
                self.exp_gt += k

    def add_pairings(self, k):
        with self._lock:
            self.pairings += k

    def snapshot(self):
        with self._lock:
            return {
                "exp_g1": self.exp_g1,
                "exp_g2": self.exp_g2,
                "exp_gt": self.exp_gt,
                "pairings": self.pairings,
            }


class _SourceElem:
    """Element of G1 or G2 in Jacobian form, with a cached affine view."""

    __slots__ = ("point", "_affine", "_bytes")

    group = None
    _curve = None
    _encode = None

    def __init__(self, point, affine=None):
        self.point = point
        self._affine = affine if point is not None else None
        self._bytes = None

    @property
    def affine(self):
        if self._affine is None and self.point is not None:
            self._affine = self._curve.to_affine(self.point)
        return self._affine

    def is_identity(self):
        return self.point is None

    def to_bytes(self):
        if self._bytes is None:
            self._bytes = type(self)._encode(self.affine)
        return self._bytes

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self._curve.eq(self.point, other.point)

    def __hash__(self):
        return hash(self.to_bytes())

    def __repr__(self):
        return f"{type(self).__name__}({self.to_bytes().hex()[:16]}...)"


class G1Elem(_SourceElem):
    group = G1
    _curve = CURVE_G1
    _encode = staticmethod(enc.g1_to_bytes)

    @classmethod
    def from_bytes(cls, data):
        aff = enc.g1_from_bytes(data)
        return cls(None if aff is None else (aff[0], aff[1], CURVE_G1.one), aff)


class G2Elem(_SourceElem):
    group = G2
    _curve = CURVE_G2
    _encode = staticmethod(enc.g2_to_bytes)

    @classmethod
    def from_bytes(cls, data):
        aff = enc.g2_from_bytes(data)
        return cls(None if aff is None else (aff[0], aff[1], CURVE_G2.one), aff)


class GTElem:
    """Target-group element, an Fp12 value in the order-p subgroup."""

    __slots__ = ("val",)

    group = GT

    def __init__(self, val):
        self.val = val

    def is_identity(self):
        return self.val == F.F12_ONE

    def to_bytes(self):
        return enc.gt_to_bytes(self.val)

    @classmethod
    def from_bytes(cls, data):
        return cls(enc.gt_from_bytes(data))

    def __eq__(self, other):
        if not isinstance(other, GTElem):
            return NotImplemented
        return self.val == other.val

    def __hash__(self):
        return hash(self.val)

    def __repr__(self):
        return f"GTElem({self.to_bytes().hex()[:16]}...)"


class _FixedBaseTable:
    """4-bit fixed-window exponentiation table for a source-group generator."""

    def __init__(self, curve, gen):
        self.curve = curve
        windows = []
        base = gen
        for _ in range((R.bit_length() + _WINDOW - 1) // _WINDOW):
            row = [base]
            for _ in range((1 << _WINDOW) - 2):
                row.append(curve.add(row[-1], base))
            windows.append(row)
            for _ in range(_WINDOW):
                base = curve.dbl(base)
        flat = curve.batch_to_affine([p for row in windows for p in row])
        k = (1 << _WINDOW) - 1
        self.windows = [flat[i * k:(i + 1) * k] for i in range(len(windows))]

    def exp(self, e):
        acc = None
        w = 0
        while e > 0:
            d = e & ((1 << _WINDOW) - 1)
            if d:
                acc = self.curve.add_affine(acc, self.windows[w][d - 1])
            e >>= _WINDOW
            w += 1
        return acc


class GroupContext:
    """Immutable Type-3 bilinear group with an attached operation counter."""

    curve_id = "BLS12-381"

    def __init__(self, security_level):
        self.security_level = security_level
        self.p = int(R)
        self.counter = OpCounter()
        self._g1_table = _FixedBaseTable(CURVE_G1, G1_GEN)
        self._g2_table = _FixedBaseTable(CURVE_G2, G2_GEN)
        self.g1 = G1Elem(G1_GEN)
        self.g2 = G2Elem(G2_GEN)
        self.gT = self.pair(self.g1, self.g2, _count=False)
        self._gt_inv_table = None

    # -- exponentiation -----------------------------------------------------

    def exp(self, group, base, s):
        """base^s with s an integer (signed values use the centered lift)."""
        e = int(s) % self.p
        self.counter.add_exp(group)
        # Exponents above p/2 are cheaper as an inverse of a short exponent.
        negate = e > self.p - e
        if negate:
            e = self.p - e
        if group == GT:
            r = _gt_pow(base.val, e)
            return GTElem(F.f12_conj(r) if negate else r)
        if group == G1:
            if base is self.g1:
                pt = self._g1_table.exp(e)
            else:
                pt = CURVE_G1.mul(base.point, e)
            return G1Elem(CURVE_G1.neg(pt) if negate else pt)
        if group == G2:
            if base is self.g2:
                pt = self._g2_table.exp(e)
            else:
                pt = CURVE_G2.mul(base.point, e)
            return G2Elem(CURVE_G2.neg(pt) if negate else pt)
        raise ValueError(f"unknown group {group!r}")

    # -- group law ----------------------------------------------------------

    def mul(self, a, b):
        """Group operation on two elements of the same group."""
        if isinstance(a, GTElem):
            return GTElem(F.f12_mul(a.val, b.val))
        if isinstance(a, G1Elem):
            return G1Elem(CURVE_G1.add(a.point, b.point))
        return G2Elem(CURVE_G2.add(a.point, b.point))

    def inv(self, a):
        if isinstance(a, GTElem):
            # GT lies in the cyclotomic subgroup: inverse == conjugate.
            return GTElem(F.f12_conj(a.val))
        if isinstance(a, G1Elem):
            return G1Elem(CURVE_G1.neg(a.point))
        return G2Elem(CURVE_G2.neg(a.point))

    def identity(self, group):
        if group == GT:
            return GTElem(F.F12_ONE)
        return G1Elem(None) if group == G1 else G2Elem(None)

    # -- pairings -----------------------------------------------------------

    def pair(self, a, b, _count=True):
        if _count:
            self.counter.add_pairings(1)
        return self._pair_product([(a, b)])

    def multi_pair(self, pairs):
        """Product of pairings; the counter increases by len(pairs).

        Internally, pairs sharing the same G2 element are merged by adding
        their G1 components, so the number of Miller-loop evaluations can
        be far below the accounted pairing count.
        """
        if not pairs:
            raise ValueError("multi_pair requires a non-empty list")
        self.counter.add_pairings(len(pairs))
        return self._pair_product(pairs)

    def _pair_product(self, pairs):
        merged = {}
        for a, b in pairs:
            if a.is_identity() or b.is_identity():
                continue
            key = id(b)
            if key in merged:
                acc, belem = merged[key]
                merged[key] = (CURVE_G1.add(acc, a.point), belem)
            else:
                merged[key] = (a.point, b)
        if not merged:
            return GTElem(F.F12_ONE)
        g1_pts = CURVE_G1.batch_to_affine([v[0] for v in merged.values()])
        affine_pairs = [
            (pa, v[1].affine)
            for pa, v in zip(g1_pts, merged.values())
            if pa is not None
        ]
        if not affine_pairs:
            return GTElem(F.F12_ONE)
        return GTElem(final_exponentiation(miller_loop(affine_pairs)))


def _gt_pow(val, e):
    """Exponentiation in GT: cyclotomic squarings plus signed windows."""
    if e == 0:
        return F.F12_ONE
    # width-2 signed digits keep the table tiny; GT exps are rarely hot.
    digits = []
    while e > 0:
        if e & 1:
            d = e & 3
            if d == 3:
                d = -1
            e -= d
        else:
            d = 0
        digits.append(d)
        e >>= 1
    r = None
    for d in reversed(digits):
        if r is not None:
            r = F.f12_cyclotomic_sqr(r)
        if d == 1:
            r = val if r is None else F.f12_mul(r, val)
        elif d == -1:
            c = F.f12_conj(val)
            r = c if r is None else F.f12_mul(r, c)
    return r


def centered_lift(z, p):
    """Embed a signed integer into [0, p)."""
    return int(z) % p


def centered_unlift(v, p):
    """Decode a canonical residue to the centered range [-p/2, p/2)."""
    v = int(v) % p
    return v - p if v >= (p + 1) // 2 else v


_CTX_CACHE = {}
_CTX_LOCK = threading.Lock()


def setup_group(security_level):
    """Deterministic group setup; only the 128-bit level is supported."""
    if security_level != 128:
        raise ValueError(f"unsupported security level: {security_level}")
    with _CTX_LOCK:
        ctx = _CTX_CACHE.get(security_level)
        if ctx is None:
            ctx = GroupContext(security_level)
            _CTX_CACHE[security_level] = ctx
        return ctx
