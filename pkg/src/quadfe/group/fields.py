"""Extension-field tower for the BLS12-381 base field.

Layout: Fp2 = Fp[u]/(u^2 + 1), Fp6 = Fp2[v]/(v^3 - (u+1)),
Fp12 = Fp6[w]/(w^2 - v).  Elements are plain tuples of gmpy2 integers:
an Fp2 element is (c0, c1), an Fp6 element is a 3-tuple of Fp2, and an
Fp12 element is a 2-tuple of Fp6.  Everything here is a free function so
the hot paths stay allocation-light.
"""

from gmpy2 import mpz, invert

# Base field modulus of BLS12-381.
P = mpz(0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB)

_ZERO = mpz(0)
_ONE = mpz(1)

F2_ZERO = (_ZERO, _ZERO)
F2_ONE = (_ONE, _ZERO)
F6_ZERO = (F2_ZERO, F2_ZERO, F2_ZERO)
F6_ONE = (F2_ONE, F2_ZERO, F2_ZERO)
F12_ZERO = (F6_ZERO, F6_ZERO)
F12_ONE = (F6_ONE, F6_ZERO)


# ---------------------------------------------------------------------------
# Fp
# ---------------------------------------------------------------------------

def fp_inv(a):
    return invert(a, P)


def fp_sqrt(a):
    # P == 3 (mod 4), so a QR has square root a^((P+1)/4).
    r = pow(a, (P + 1) >> 2, P)
    if r * r % P != a % P:
        raise ValueError("not a quadratic residue in Fp")
    return r


# ---------------------------------------------------------------------------
# Fp2, u^2 = -1
# ---------------------------------------------------------------------------

def f2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def f2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def f2_neg(a):
    return (-a[0] % P, -a[1] % P)


def f2_conj(a):
    return (a[0], -a[1] % P)


def f2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def f2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, (a0 * a1 << 1) % P)


def f2_mul_fp(a, k):
    return (a[0] * k % P, a[1] * k % P)


def f2_mul_xi(a):
    # Multiply by xi = 1 + u, the Fp6 non-residue.
    a0, a1 = a
    return ((a0 - a1) % P, (a0 + a1) % P)


def f2_inv(a):
    a0, a1 = a
    d = invert(a0 * a0 + a1 * a1, P)
    return (a0 * d % P, -a1 * d % P)


def f2_batch_inv(elems):
    """Invert a list of nonzero Fp2 elements with a single Fp inversion."""
    norms = []
    acc = _ONE
    prefix = []
    for a0, a1 in elems:
        n = (a0 * a0 + a1 * a1) % P
        norms.append(n)
        prefix.append(acc)
        acc = acc * n % P
    inv_acc = invert(acc, P)
    out = [None] * len(elems)
    for i in range(len(elems) - 1, -1, -1):
        d = inv_acc * prefix[i] % P
        inv_acc = inv_acc * norms[i] % P
        a0, a1 = elems[i]
        out[i] = (a0 * d % P, -a1 * d % P)
    return out


def f2_pow(a, e):
    r = F2_ONE
    b = a
    while e > 0:
        if e & 1:
            r = f2_mul(r, b)
        b = f2_sqr(b)
        e >>= 1
    return r


def f2_sqrt(a):
    """Square root in Fp2 via the norm map; raises if a is not a square."""
    a0, a1 = a
    if a1 == 0:
        try:
            return (fp_sqrt(a0), _ZERO)
        except ValueError:
            # a0 is a non-residue, so a0 = -(b^2) and (b*u)^2 = -b^2 = a0.
            return (_ZERO, fp_sqrt(-a0 % P))
    n = (a0 * a0 + a1 * a1) % P
    s = fp_sqrt(n)
    inv2 = invert(mpz(2), P)
    d = (a0 + s) * inv2 % P
    try:
        x0 = fp_sqrt(d)
    except ValueError:
        d = (a0 - s) * inv2 % P
        x0 = fp_sqrt(d)
    x1 = a1 * invert(x0 << 1, P) % P
    r = (x0, x1)
    if f2_sqr(r) != (a0 % P, a1 % P):
        raise ValueError("not a quadratic residue in Fp2")
    return r


# ---------------------------------------------------------------------------
# Fp6, v^3 = xi
# ---------------------------------------------------------------------------

def f6_add(a, b):
    return (f2_add(a[0], b[0]), f2_add(a[1], b[1]), f2_add(a[2], b[2]))


def f6_sub(a, b):
    return (f2_sub(a[0], b[0]), f2_sub(a[1], b[1]), f2_sub(a[2], b[2]))


def f6_neg(a):
    return (f2_neg(a[0]), f2_neg(a[1]), f2_neg(a[2]))


def f6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    t2 = f2_mul(a2, b2)
    c0 = f2_add(t0, f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)), f2_add(t1, t2))))
    c1 = f2_add(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1)), f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), f2_add(t0, t2)), t1)
    return (c0, c1, c2)


def f6_sqr(a):
    a0, a1, a2 = a
    t0 = f2_sqr(a0)
    t1 = f2_sqr(a1)
    t2 = f2_sqr(a2)
    c0 = f2_add(t0, f2_mul_xi(f2_sub(f2_sqr(f2_add(a1, a2)), f2_add(t1, t2))))
    c1 = f2_add(f2_sub(f2_sqr(f2_add(a0, a1)), f2_add(t0, t1)), f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_sqr(f2_add(a0, a2)), f2_add(t0, t2)), t1)
    return (c0, c1, c2)


def f6_mul_v(a):
    # Multiply by v: (a0 + a1 v + a2 v^2) v = xi a2 + a0 v + a1 v^2.
    return (f2_mul_xi(a[2]), a[0], a[1])


def f6_mul_f2(a, k):
    return (f2_mul(a[0], k), f2_mul(a[1], k), f2_mul(a[2], k))


def f6_inv(a):
    a0, a1, a2 = a
    c0 = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    c1 = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    c2 = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    d = f2_add(f2_mul(a0, c0), f2_mul_xi(f2_add(f2_mul(a2, c1), f2_mul(a1, c2))))
    di = f2_inv(d)
    return (f2_mul(c0, di), f2_mul(c1, di), f2_mul(c2, di))


# ---------------------------------------------------------------------------
# Fp12, w^2 = v
# ---------------------------------------------------------------------------

def f12_add(a, b):
    return (f6_add(a[0], b[0]), f6_add(a[1], b[1]))


def f12_mul(a, b):
    ax, ay = a
    bx, by = b
    t0 = f6_mul(ax, bx)
    t1 = f6_mul(ay, by)
    c1 = f6_sub(f6_mul(f6_add(ax, ay), f6_add(bx, by)), f6_add(t0, t1))
    return (f6_add(t0, f6_mul_v(t1)), c1)


def f12_sqr(a):
    ax, ay = a
    t0 = f6_mul(ax, ay)
    c0 = f6_mul(f6_add(ax, ay), f6_add(ax, f6_mul_v(ay)))
    c0 = f6_sub(f6_sub(c0, t0), f6_mul_v(t0))
    return (c0, f6_add(t0, t0))


def f12_conj(a):
    # The p^6 Frobenius, i.e. the unitary inverse on the cyclotomic subgroup.
    return (a[0], f6_neg(a[1]))


def f12_inv(a):
    ax, ay = a
    d = f6_inv(f6_sub(f6_sqr(ax), f6_mul_v(f6_sqr(ay))))
    return (f6_mul(ax, d), f6_neg(f6_mul(ay, d)))


def f12_pow(a, e):
    if e < 0:
        return f12_pow(f12_inv(a), -e)
    r = F12_ONE
    b = a
    while e > 0:
        if e & 1:
            r = f12_mul(r, b)
        b = f12_sqr(b)
        e >>= 1
    return r


def f12_sparse_mul(f, a2, b2, c):
    """Multiply f by the sparse line value a2 + b2*w^2 + (c)*w^3, c in Fp.

    In the (x + y*w) representation the line is (lx, ly) with
    lx = (a2, b2, 0) and ly = (0, (c, 0), 0).
    """
    fx, fy = f
    cf = (c, _ZERO)
    u0 = _f6_mul_sparse01(fx, a2, b2)
    u1 = _f6_mul_by_c1(fy, cf)
    t0 = _f6_mul_by_c1(fx, cf)
    t1 = _f6_mul_sparse01(fy, a2, b2)
    return (f6_add(u0, f6_mul_v(u1)), f6_add(t0, t1))


def _f6_mul_sparse01(a, b0, b1):
    # a * (b0 + b1 v) with a fully dense.
    a0, a1, a2 = a
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    c0 = f2_add(t0, f2_mul_xi(f2_mul(a2, b1)))
    c1 = f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1))
    c2 = f2_add(f2_mul(a2, b0), t1)
    return (c0, c1, c2)


def _f6_mul_by_c1(a, b1):
    # a * (b1 v).
    return (f2_mul_xi(f2_mul(a[2], b1)), f2_mul(a[0], b1), f2_mul(a[1], b1))


def _f4_sqr(a, b):
    # Squaring in Fp4 = Fp2[y]/(y^2 - xi): (a + b y)^2.
    t0 = f2_sqr(a)
    t1 = f2_sqr(b)
    c0 = f2_add(f2_mul_xi(t1), t0)
    c1 = f2_sub(f2_sub(f2_sqr(f2_add(a, b)), t0), t1)
    return c0, c1


def f12_cyclotomic_sqr(f):
    """Squaring restricted to the cyclotomic subgroup (Granger-Scott).

    Only valid after the easy part of the final exponentiation; roughly
    twice as fast as a generic f12_sqr.
    """
    (z0, z4, z3), (z2, z1, z5) = f
    t0, t1 = _f4_sqr(z0, z1)
    z0 = f2_sub(t0, z0)
    z0 = f2_add(f2_add(z0, z0), t0)
    z1 = f2_add(t1, z1)
    z1 = f2_add(f2_add(z1, z1), t1)
    t0, t1 = _f4_sqr(z2, z3)
    t2, t3 = _f4_sqr(z4, z5)
    z4 = f2_sub(t0, z4)
    z4 = f2_add(f2_add(z4, z4), t0)
    z5 = f2_add(t1, z5)
    z5 = f2_add(f2_add(z5, z5), t1)
    t0 = f2_mul_xi(t3)
    z2 = f2_add(t0, z2)
    z2 = f2_add(f2_add(z2, z2), t0)
    z3 = f2_sub(t2, z3)
    z3 = f2_add(f2_add(z3, z3), t2)
    return ((z0, z4, z3), (z2, z1, z5))


# ---------------------------------------------------------------------------
# Frobenius maps on Fp12
# ---------------------------------------------------------------------------

def _w_coeffs(a):
    # (x, y) -> coefficients of w^0..w^5 over Fp2.
    (x0, x1, x2), (y0, y1, y2) = a
    return [x0, y0, x1, y1, x2, y2]


def _from_w_coeffs(c):
    return ((c[0], c[2], c[4]), (c[1], c[3], c[5]))


_XI = (_ONE, _ONE)
FROB_GAMMA1 = [f2_pow(_XI, i * (P - 1) // 6) for i in range(6)]
# gamma2[i] = xi^(i (p^2-1)/6) lies in Fp.
FROB_GAMMA2 = [f2_pow(_XI, i * (P * P - 1) // 6)[0] for i in range(6)]


def f12_frobenius(a):
    c = _w_coeffs(a)
    return _from_w_coeffs([f2_mul(f2_conj(c[i]), FROB_GAMMA1[i]) for i in range(6)])


def f12_frobenius_p2(a):
    c = _w_coeffs(a)
    return _from_w_coeffs([f2_mul_fp(c[i], FROB_GAMMA2[i]) for i in range(6)])
