"""Linear-homomorphic projection of ciphertexts.

From an encryption of (x, y) and integer matrices U, V one can compute an
encryption of (Ux, Vy) without any secret material: each projected
coordinate pair is the U- (resp. V-) weighted product of the source
coordinate pairs, which acts as the same linear map on the hidden
exponent vectors.  The matching functional key for a form q on the
projected space is the key for q evaluated at (Us, Vt).
"""

import hashlib
from dataclasses import dataclass

from .errors import DimensionError
from .group import G1, G2
from .qfe import Ciphertext, FunctionalKey, MasterSecretKey, QuadraticForm, key_exponent


@dataclass(frozen=True)
class ProjectionPair:
    """Row-wise projection matrices (U for the x side, V for the y side)."""

    u: tuple
    v: tuple

    def __post_init__(self):
        u = tuple(tuple(int(c) for c in row) for row in self.u)
        v = tuple(tuple(int(c) for c in row) for row in self.v)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        if len(u) != len(v) or not u:
            raise DimensionError("U and V must have the same positive row count")
        widths = {len(r) for r in u} | {len(r) for r in v}
        if len(widths) != 1:
            raise DimensionError("U and V must share one input dimension")

    @property
    def d(self):
        return len(self.u)

    @property
    def n(self):
        return len(self.u[0])

    @classmethod
    def identity(cls, n):
        eye = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        return cls(eye, eye)


@dataclass(frozen=True)
class ProjectedCiphertext:
    """Structurally a d-dimensional ciphertext, plus provenance metadata."""

    c_gamma: object
    a: tuple
    b: tuple
    provenance: bytes
    bound_x: int = None  # projected plaintext bound, when known
    bound_y: int = None

    @property
    def n(self):
        return len(self.a)


def ciphertext_digest(ct) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(ct.c_gamma.to_bytes())
    for pair in ct.a:
        h.update(pair[0].to_bytes())
        h.update(pair[1].to_bytes())
    for pair in ct.b:
        h.update(pair[0].to_bytes())
        h.update(pair[1].to_bytes())
    return h.digest()


def _combine(ctx, group, elems, row):
    """prod_i elems[i]^{row[i]}, skipping zero coefficients."""
    acc = None
    for coeff, elem in zip(row, elems):
        if coeff == 0:
            continue
        term = ctx.exp(group, elem, coeff)
        acc = term if acc is None else ctx.mul(acc, term)
    return acc if acc is not None else ctx.identity(group)


def project(ct: Ciphertext, proj: ProjectionPair, ctx, fc=None) -> ProjectedCiphertext:
    """Transform Enc(x, y) into Enc(Ux, Vy); uses no secret material.

    Costs 2 G1 exponentiations per nonzero entry of U and 2 G2
    exponentiations per nonzero entry of V (plus uncounted group
    additions).
    """
    if proj.n != ct.n:
        raise DimensionError(
            f"projection width {proj.n} does not match ciphertext dimension {ct.n}"
        )
    a0 = [p[0] for p in ct.a]
    a1 = [p[1] for p in ct.a]
    b0 = [p[0] for p in ct.b]
    b1 = [p[1] for p in ct.b]
    a = tuple(
        (_combine(ctx, G1, a0, row), _combine(ctx, G1, a1, row)) for row in proj.u
    )
    b = tuple(
        (_combine(ctx, G2, b0, row), _combine(ctx, G2, b1, row)) for row in proj.v
    )
    bound_x = bound_y = None
    if fc is not None:
        bound_x = max(sum(abs(c) for c in row) for row in proj.u) * fc.b_x
        bound_y = max(sum(abs(c) for c in row) for row in proj.v) * fc.b_y
    return ProjectedCiphertext(
        c_gamma=ct.c_gamma,
        a=a,
        b=b,
        provenance=ciphertext_digest(ct),
        bound_x=bound_x,
        bound_y=bound_y,
    )


def projected_keygen(
    msk: MasterSecretKey, proj: ProjectionPair, form: QuadraticForm, ctx
) -> FunctionalKey:
    """Key for the form q on the projected space: g2^{q(Us, Vt)}."""
    if proj.n != msk.n:
        raise DimensionError("projection width does not match master secret")
    if form.n != proj.d:
        raise DimensionError("form dimension does not match projection rows")
    p = ctx.p
    s_proj = tuple(sum(c * si for c, si in zip(row, msk.s)) % p for row in proj.u)
    t_proj = tuple(sum(c * ti for c, ti in zip(row, msk.t)) % p for row in proj.v)
    exponent = key_exponent(MasterSecretKey(s=s_proj, t=t_proj), form, p)
    return FunctionalKey(k=ctx.exp(G2, ctx.g2, exponent), form=form)
