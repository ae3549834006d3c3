"""Short-Weierstrass point arithmetic for the two source groups.

Both G1 (over Fp) and G2 (over Fp2) are y^2 = x^3 + b curves, so a single
Jacobian-coordinate implementation is parameterized by the coordinate
field.  Points are (X, Y, Z) triples of field elements; the identity is
None.  Formulas are the standard a=0 ones (dbl-2009-l, add-2007-bl).
"""

from gmpy2 import mpz

from . import fields as F

# Scalar group order of BLS12-381 (the prime r).
R = mpz(0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001)

# Curve parameter of the BLS family: |x| with x negative.
BLS_X = mpz(0xD201000000010000)

G1_GEN_AFFINE = (
    mpz(0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB),
    mpz(0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1),
)

G2_GEN_AFFINE = (
    (
        mpz(352701069587466618187139116011060144890029952792775240219908644239793785735715026873347600343865175952761926303160),
        mpz(3059144344244213709971259814753781636986470325476647558659373206291635324768958432433509563104347017837885763365758),
    ),
    (
        mpz(1985150602287291935568054521177171638300868978215655730859378665066344726373823718423869104263333984641494340347905),
        mpz(927553665492332455747201965776037880757740193453592970025027978793976877002675564980949289727957565575433344219582),
    ),
)


def _wnaf(k, width):
    """Signed sliding-window (wNAF) digits of k, least significant first."""
    digits = []
    pow2 = 1 << width
    half = pow2 >> 1
    while k > 0:
        if k & 1:
            d = k & (pow2 - 1)
            if d >= half:
                d -= pow2
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits


class CurveGroup:
    """Jacobian arithmetic over an arbitrary coordinate field."""

    def __init__(self, add, sub, mul, sqr, neg, zero, one, b_coeff, batch_inv):
        self.fadd = add
        self.fsub = sub
        self.fmul = mul
        self.fsqr = sqr
        self.fneg = neg
        self.zero = zero
        self.one = one
        self.b = b_coeff
        self.batch_inv = batch_inv

    def dbl(self, p):
        if p is None:
            return None
        x, y, z = p
        mul, sqr, add, sub = self.fmul, self.fsqr, self.fadd, self.fsub
        a = sqr(x)
        b = sqr(y)
        c = sqr(b)
        d = sub(sub(sqr(add(x, b)), a), c)
        d = add(d, d)
        e = add(add(a, a), a)
        f = sqr(e)
        x3 = sub(f, add(d, d))
        c8 = add(c, c)
        c8 = add(c8, c8)
        c8 = add(c8, c8)
        y3 = sub(mul(e, sub(d, x3)), c8)
        z3 = mul(add(y, y), z)
        return (x3, y3, z3)

    def add(self, p, q):
        if p is None:
            return q
        if q is None:
            return p
        x1, y1, z1 = p
        x2, y2, z2 = q
        mul, sqr, add, sub = self.fmul, self.fsqr, self.fadd, self.fsub
        z1z1 = sqr(z1)
        z2z2 = sqr(z2)
        u1 = mul(x1, z2z2)
        u2 = mul(x2, z1z1)
        s1 = mul(mul(y1, z2), z2z2)
        s2 = mul(mul(y2, z1), z1z1)
        h = sub(u2, u1)
        if h == self.zero:
            if s1 == s2:
                return self.dbl(p)
            return None
        i = sqr(add(h, h))
        j = mul(h, i)
        rr = sub(s2, s1)
        rr = add(rr, rr)
        v = mul(u1, i)
        x3 = sub(sub(sqr(rr), j), add(v, v))
        s1j = mul(s1, j)
        y3 = sub(mul(rr, sub(v, x3)), add(s1j, s1j))
        z3 = sub(sqr(add(z1, z2)), add(z1z1, z2z2))
        z3 = mul(z3, h)
        return (x3, y3, z3)

    def add_affine(self, p, q_aff):
        """Mixed addition with an affine (Z=1) second operand."""
        if q_aff is None:
            return p
        if p is None:
            return (q_aff[0], q_aff[1], self.one)
        x1, y1, z1 = p
        x2, y2 = q_aff
        mul, sqr, add, sub = self.fmul, self.fsqr, self.fadd, self.fsub
        z1z1 = sqr(z1)
        u2 = mul(x2, z1z1)
        s2 = mul(mul(y2, z1), z1z1)
        h = sub(u2, x1)
        if h == self.zero:
            if y1 == s2:
                return self.dbl(p)
            return None
        hh = sqr(h)
        i = add(hh, hh)
        i = add(i, i)
        j = mul(h, i)
        rr = sub(s2, y1)
        rr = add(rr, rr)
        v = mul(x1, i)
        x3 = sub(sub(sqr(rr), j), add(v, v))
        y1j = mul(y1, j)
        y3 = sub(mul(rr, sub(v, x3)), add(y1j, y1j))
        z3 = sub(sub(sqr(add(z1, h)), z1z1), hh)
        return (x3, y3, z3)

    def neg(self, p):
        if p is None:
            return None
        return (p[0], self.fneg(p[1]), p[2])

    def mul(self, p, k):
        """Scalar multiplication, width-4 wNAF."""
        k = int(k) % R
        if k == 0 or p is None:
            return None
        digits = _wnaf(k, 4)
        p2 = self.dbl(p)
        odd = [p]
        for _ in range(3):
            odd.append(self.add(odd[-1], p2))
        odd_neg = [self.neg(t) for t in odd]
        acc = None
        for d in reversed(digits):
            acc = self.dbl(acc)
            if d > 0:
                acc = self.add(acc, odd[(d - 1) >> 1])
            elif d < 0:
                acc = self.add(acc, odd_neg[(-d - 1) >> 1])
        return acc

    def to_affine(self, p):
        if p is None:
            return None
        x, y, z = p
        if z == self.one:
            return (x, y)
        zi = self.batch_inv([z])[0]
        zi2 = self.fsqr(zi)
        return (self.fmul(x, zi2), self.fmul(y, self.fmul(zi, zi2)))

    def batch_to_affine(self, pts):
        """Normalize many Jacobian points with one field inversion."""
        idx = [i for i, p in enumerate(pts) if p is not None and p[2] != self.one]
        out = [None if p is None else (p[0], p[1]) for p in pts]
        if idx:
            zis = self.batch_inv([pts[i][2] for i in idx])
            for i, zi in zip(idx, zis):
                x, y, _ = pts[i]
                zi2 = self.fsqr(zi)
                out[i] = (self.fmul(x, zi2), self.fmul(y, self.fmul(zi, zi2)))
        return out

    def eq(self, p, q):
        if p is None or q is None:
            return p is None and q is None
        x1, y1, z1 = p
        x2, y2, z2 = q
        mul, sqr = self.fmul, self.fsqr
        z1z1 = sqr(z1)
        z2z2 = sqr(z2)
        if mul(x1, z2z2) != mul(x2, z1z1):
            return False
        return mul(mul(y1, z2), z2z2) == mul(mul(y2, z1), z1z1)

    def is_on_curve_affine(self, p_aff):
        x, y = p_aff
        return self.fsqr(y) == self.fadd(self.fmul(self.fsqr(x), x), self.b)


def _fp_batch_inv(elems):
    acc = mpz(1)
    prefix = []
    for e in elems:
        prefix.append(acc)
        acc = acc * e % F.P
    inv_acc = F.fp_inv(acc)
    out = [None] * len(elems)
    for i in range(len(elems) - 1, -1, -1):
        out[i] = inv_acc * prefix[i] % F.P
        inv_acc = inv_acc * elems[i] % F.P
    return out


CURVE_G1 = CurveGroup(
    add=lambda a, b: (a + b) % F.P,
    sub=lambda a, b: (a - b) % F.P,
    mul=lambda a, b: a * b % F.P,
    sqr=lambda a: a * a % F.P,
    neg=lambda a: -a % F.P,
    zero=mpz(0),
    one=mpz(1),
    b_coeff=mpz(4),
    batch_inv=_fp_batch_inv,
)

# The G2 twist has b = 4(1 + u).
CURVE_G2 = CurveGroup(
    add=F.f2_add,
    sub=F.f2_sub,
    mul=F.f2_mul,
    sqr=F.f2_sqr,
    neg=F.f2_neg,
    zero=F.F2_ZERO,
    one=F.F2_ONE,
    b_coeff=(mpz(4), mpz(4)),
    batch_inv=F.f2_batch_inv,
)

G1_GEN = (G1_GEN_AFFINE[0], G1_GEN_AFFINE[1], CURVE_G1.one)
G2_GEN = (G2_GEN_AFFINE[0], G2_GEN_AFFINE[1], CURVE_G2.one)
