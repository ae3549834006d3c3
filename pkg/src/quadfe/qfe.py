"""Public-key functional encryption for bounded quadratic forms.

A ciphertext encrypts a vector pair (x, y); a functional key for the form
q reveals exactly q(x, y) = sum_ij q_ij x_i y_j and nothing else about the
plaintexts.  Construction: the master secret is a pair of uniform vectors
(s, t); each coordinate of the ciphertext hides (x_i, gamma*s_i) and
(y_i, -t_i) behind a fresh random change of basis W in GL_2, giving the
cross-term identity <a_i, b_j> = x_i y_j - gamma s_i t_j in the exponent,
so the product of pairings telescopes to gT^(q(x,y)) once the key term
gT^(gamma q(s,t)) is multiplied back in.
"""

import random
from dataclasses import dataclass

from .errors import DimensionError, OutOfBoundsError, OutOfRangeError, ValidationError
from .group import G1, G2, GroupContext


@dataclass(frozen=True)
class FunctionClass:
    """Dimension and bounds defining the supported quadratic forms."""

    n: int
    b_x: int
    b_y: int
    b_q: int

    def validate(self, group_order):
        if self.n < 1:
            raise ValidationError("function class dimension must be >= 1")
        if min(self.b_x, self.b_y, self.b_q) <= 0:
            raise ValidationError("function class bounds must be positive")
        if 2 * self.n * self.n * self.b_q * self.b_x * self.b_y >= group_order:
            raise ValidationError(
                "output bound n^2*Bq*Bx*By exceeds the decodable range p/2"
            )


class QuadraticForm:
    """Integer coefficient matrix q_ij of a bilinear form on Z^n x Z^n."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(tuple(int(c) for c in row) for row in coeffs)
        n = len(coeffs)
        if n == 0 or any(len(row) != n for row in coeffs):
            raise DimensionError("quadratic form must be a square matrix")
        self.coeffs = coeffs

    @property
    def n(self):
        return len(self.coeffs)

    @classmethod
    def zero(cls, n):
        return cls([[0] * n for _ in range(n)])

    def nonzero(self):
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if c:
                    yield i, j, c

    def validate(self, fc: FunctionClass):
        if self.n != fc.n:
            raise DimensionError(
                f"form dimension {self.n} does not match function class {fc.n}"
            )
        for i, j, c in self.nonzero():
            if abs(c) > fc.b_q:
                raise OutOfBoundsError(f"coefficient q[{i}][{j}]={c} exceeds B_q={fc.b_q}")

    def evaluate(self, x, y):
        """Exact integer evaluation sum_ij q_ij x_i y_j."""
        return sum(c * x[i] * y[j] for i, j, c in self.nonzero())

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self.coeffs == other.coeffs


@dataclass(frozen=True)
class MasterSecretKey:
    s: tuple
    t: tuple

    @property
    def n(self):
        return len(self.s)


@dataclass(frozen=True)
class PublicKey:
    group: GroupContext
    g1_s: tuple  # g1^{s_i}
    g2_t: tuple  # g2^{t_i}

    @property
    def n(self):
        return len(self.g1_s)


@dataclass(frozen=True)
class Ciphertext:
    c_gamma: object           # g1^gamma
    a: tuple                  # n pairs of G1 elements
    b: tuple                  # n pairs of G2 elements

    @property
    def n(self):
        return len(self.a)


@dataclass(frozen=True)
class FunctionalKey:
    k: object                 # g2^{q(s,t)}
    form: QuadraticForm


def _rng_or_system(rng):
    return rng if rng is not None else random.SystemRandom()


def setup(fc: FunctionClass, group: GroupContext, rng=None):
    """Sample the master secret (s, t) and publish (g1^s, g2^t)."""
    fc.validate(group.p)
    rng = _rng_or_system(rng)
    s = tuple(rng.randrange(group.p) for _ in range(fc.n))
    t = tuple(rng.randrange(group.p) for _ in range(fc.n))
    pk = PublicKey(
        group=group,
        g1_s=tuple(group.exp(G1, group.g1, si) for si in s),
        g2_t=tuple(group.exp(G2, group.g2, ti) for ti in t),
    )
    return pk, MasterSecretKey(s=s, t=t)


def _sample_glt2(rng, p):
    """Uniform invertible 2x2 matrix over Z_p, by rejection on det == 0."""
    while True:
        w = [[rng.randrange(p) for _ in range(2)] for _ in range(2)]
        det = (w[0][0] * w[1][1] - w[0][1] * w[1][0]) % p
        if det:
            return w, det


def encrypt(pk: PublicKey, x, y, fc: FunctionClass, rng=None) -> Ciphertext:
    """Encrypt the vector pair (x, y); uses only public-key material."""
    ctx = pk.group
    fc.validate(ctx.p)
    if len(x) != fc.n or len(y) != fc.n or pk.n != fc.n:
        raise DimensionError("plaintext length does not match function class")
    for v, bound, name in ((x, fc.b_x, "x"), (y, fc.b_y, "y")):
        for i, vi in enumerate(v):
            if abs(int(vi)) > bound:
                raise OutOfBoundsError(f"{name}[{i}]={vi} exceeds bound {bound}")
    rng = _rng_or_system(rng)
    p = ctx.p
    gamma = rng.randrange(p)
    w, det = _sample_glt2(rng, p)
    det_inv = pow(det, -1, p)
    # winv_t = (W^{-1})^T for the a-side exponents.
    wt00 = w[1][1] * det_inv % p
    wt01 = -w[1][0] * det_inv % p
    wt10 = -w[0][1] * det_inv % p
    wt11 = w[0][0] * det_inv % p

    # a_i = ((W^-1)^T) (x_i, gamma s_i):  g1^{a_i0} = (g1^{wt00})^{x_i} * S_i^{wt01 gamma}
    base_a0 = ctx.exp(G1, ctx.g1, wt00)
    base_a1 = ctx.exp(G1, ctx.g1, wt10)
    e_a0 = wt01 * gamma % p
    e_a1 = wt11 * gamma % p
    a = tuple(
        (
            ctx.mul(ctx.exp(G1, base_a0, xi), ctx.exp(G1, si, e_a0)),
            ctx.mul(ctx.exp(G1, base_a1, xi), ctx.exp(G1, si, e_a1)),
        )
        for xi, si in zip(x, pk.g1_s)
    )
    # b_i = W (y_i, -t_i):  g2^{b_i0} = (g2^{w00})^{y_i} * T_i^{-w01}
    base_b0 = ctx.exp(G2, ctx.g2, w[0][0])
    base_b1 = ctx.exp(G2, ctx.g2, w[1][0])
    e_b0 = -w[0][1] % p
    e_b1 = -w[1][1] % p
    b = tuple(
        (
            ctx.mul(ctx.exp(G2, base_b0, yi), ctx.exp(G2, ti, e_b0)),
            ctx.mul(ctx.exp(G2, base_b1, yi), ctx.exp(G2, ti, e_b1)),
        )
        for yi, ti in zip(y, pk.g2_t)
    )
    return Ciphertext(c_gamma=ctx.exp(G1, ctx.g1, gamma), a=a, b=b)


def key_exponent(msk: MasterSecretKey, form: QuadraticForm, p):
    """q(s, t) mod p, the discrete log of the functional key."""
    return sum(c * msk.s[i] * msk.t[j] for i, j, c in form.nonzero()) % p


def keygen(msk: MasterSecretKey, form: QuadraticForm, group: GroupContext) -> FunctionalKey:
    if form.n != msk.n:
        raise DimensionError("form dimension does not match master secret")
    return FunctionalKey(
        k=group.exp(G2, group.g2, key_exponent(msk, form, group.p)),
        form=form,
    )


def decrypt(pk: PublicKey, ct: Ciphertext, dk: FunctionalKey, bound, table) -> int:
    """Recover q(x, y) exactly.

    Pairing count is 1 + 2*(number of nonzero coefficients): the key term
    plus two vector-component pairings per cross term.  Raises OutOfRange
    if the result is not found within [-bound, bound].
    """
    ctx = pk.group
    if dk.form.n != ct.n:
        raise DimensionError("key form dimension does not match ciphertext")
    if table.bound < bound:
        raise ValidationError(
            f"dlog table bound {table.bound} smaller than requested bound {bound}"
        )
    pairs = [(ct.c_gamma, dk.k)]
    for i, j, c in dk.form.nonzero():
        ai, bj = ct.a[i], ct.b[j]
        pairs.append((ctx.exp(G1, ai[0], c), bj[0]))
        pairs.append((ctx.exp(G1, ai[1], c), bj[1]))
    out = ctx.multi_pair(pairs)
    z = table.solve(out)
    if abs(z) > bound:
        raise OutOfRangeError(f"decrypted value {z} outside requested bound {bound}")
    return z
