"""Canonical byte encodings for group elements.

G1 and G2 use the standard 48/96-byte compressed encodings of BLS12-381
(three flag bits in the top of the first byte: compression, infinity,
sign of y).  GT elements are encoded as the 12 base-field coefficients in
big-endian order.  Decoding validates canonicity and curve membership and
raises ValueError on any malformed input.
"""

from gmpy2 import mpz

from . import fields as F
from .curve import CURVE_G1, CURVE_G2

_FLAG_COMPRESSED = 0x80
_FLAG_INFINITY = 0x40
_FLAG_SIGN = 0x20

G1_ENC_LEN = 48
G2_ENC_LEN = 96
GT_ENC_LEN = 576

_P_HALF = (F.P - 1) >> 1


def _fp_to_bytes(a):
    return int(a).to_bytes(48, "big")


def _fp_from_bytes(b):
    a = int.from_bytes(b, "big")
    if a >= F.P:
        raise ValueError("field element not canonical")
    return mpz(a)


def _y_is_larger(y, y_neg):
    return y > y_neg


def g1_to_bytes(p_aff):
    """Encode an affine G1 point (or None for the identity)."""
    if p_aff is None:
        out = bytearray(G1_ENC_LEN)
        out[0] = _FLAG_COMPRESSED | _FLAG_INFINITY
        return bytes(out)
    x, y = p_aff
    out = bytearray(_fp_to_bytes(x))
    out[0] |= _FLAG_COMPRESSED
    if _y_is_larger(y, -y % F.P):
        out[0] |= _FLAG_SIGN
    return bytes(out)


def g1_from_bytes(b):
    if len(b) != G1_ENC_LEN:
        raise ValueError("bad G1 encoding length")
    flags = b[0]
    if not flags & _FLAG_COMPRESSED:
        raise ValueError("uncompressed G1 encoding not supported")
    if flags & _FLAG_INFINITY:
        if flags & _FLAG_SIGN or any(b[1:]) or b[0] != (_FLAG_COMPRESSED | _FLAG_INFINITY):
            raise ValueError("non-canonical G1 identity encoding")
        return None
    x = _fp_from_bytes(bytes([flags & 0x1F]) + b[1:])
    try:
        y = F.fp_sqrt((x * x % F.P * x + 4) % F.P)
    except ValueError:
        raise ValueError("x coordinate not on the G1 curve") from None
    if _y_is_larger(y, -y % F.P) != bool(flags & _FLAG_SIGN):
        y = -y % F.P
    return (x, y)


def g2_to_bytes(p_aff):
    """Encode an affine G2 point (or None for the identity)."""
    if p_aff is None:
        out = bytearray(G2_ENC_LEN)
        out[0] = _FLAG_COMPRESSED | _FLAG_INFINITY
        return bytes(out)
    (x0, x1), (y0, y1) = p_aff
    out = bytearray(_fp_to_bytes(x1) + _fp_to_bytes(x0))
    out[0] |= _FLAG_COMPRESSED
    if (y1, y0) > ((-y1) % F.P, (-y0) % F.P):
        out[0] |= _FLAG_SIGN
    return bytes(out)


def g2_from_bytes(b):
    if len(b) != G2_ENC_LEN:
        raise ValueError("bad G2 encoding length")
    flags = b[0]
    if not flags & _FLAG_COMPRESSED:
        raise ValueError("uncompressed G2 encoding not supported")
    if flags & _FLAG_INFINITY:
        if flags & _FLAG_SIGN or any(b[1:]) or b[0] != (_FLAG_COMPRESSED | _FLAG_INFINITY):
            raise ValueError("non-canonical G2 identity encoding")
        return None
    x1 = _fp_from_bytes(bytes([flags & 0x1F]) + b[1:48])
    x0 = _fp_from_bytes(b[48:])
    x = (x0, x1)
    rhs = F.f2_add(F.f2_mul(F.f2_sqr(x), x), CURVE_G2.b)
    try:
        y = F.f2_sqrt(rhs)
    except ValueError:
        raise ValueError("x coordinate not on the G2 curve") from None
    y_neg = F.f2_neg(y)
    if ((y[1], y[0]) > (y_neg[1], y_neg[0])) != bool(flags & _FLAG_SIGN):
        y = y_neg
    return (x, y)


def gt_to_bytes(f):
    (x0, x1, x2), (y0, y1, y2) = f
    coeffs = (x0, y0, x1, y1, x2, y2)  # w^0 .. w^5
    return b"".join(_fp_to_bytes(c[0]) + _fp_to_bytes(c[1]) for c in coeffs)


def gt_from_bytes(b):
    if len(b) != GT_ENC_LEN:
        raise ValueError("bad GT encoding length")
    vals = [_fp_from_bytes(b[i * 48:(i + 1) * 48]) for i in range(12)]
    c = [(vals[2 * i], vals[2 * i + 1]) for i in range(6)]
    return ((c[0], c[2], c[4]), (c[1], c[3], c[5]))
