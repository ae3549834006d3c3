"""Encrypted inference for quadratic networks with diagonal class forms.

The private network scores an input x as z_i = (Px')^T D_i (Px') where
x' = (1, x) carries the bias and every D_i is diagonal.  Inference on a
ciphertext projects it once through (P, P), pairs each projected
coordinate pair with itself (2d pairings, shared by every class), and
then derives each class score with cheap target-group exponentiations
plus one pairing for the key term, so the pairing budget is 2d + l.
"""

import time
from dataclasses import dataclass, field

from .errors import DimensionError, OutOfBoundsError, ValidationError
from .group import G1, GT
from .project import ProjectionPair, project, projected_keygen
from .qfe import Ciphertext, FunctionClass, MasterSecretKey, QuadraticForm, encrypt
from .quantize import QuantMeta
from .quantize import score_bound as compute_score_bound


@dataclass(frozen=True)
class QuadModel:
    """Integer private network: projection P (d x (n+1)) and l diagonals."""

    p_mat: tuple      # d rows of n+1 integers (column 0 multiplies the bias)
    diag: tuple       # l rows of d integers
    quant: QuantMeta
    score_bound: int

    def __post_init__(self):
        p_mat = tuple(tuple(int(c) for c in row) for row in self.p_mat)
        diag = tuple(tuple(int(c) for c in row) for row in self.diag)
        object.__setattr__(self, "p_mat", p_mat)
        object.__setattr__(self, "diag", diag)
        if not p_mat or not diag:
            raise DimensionError("model must have at least one hidden unit and class")
        if len({len(r) for r in p_mat}) != 1 or len(p_mat[0]) < 2:
            raise DimensionError("projection rows must share one width >= 2")
        if any(len(r) != len(p_mat) for r in diag):
            raise DimensionError("diagonal length must equal the hidden width d")
        wmax = self.quant.weight_max
        for name, rows in (("P", p_mat), ("diag", diag)):
            for row in rows:
                for c in row:
                    if abs(c) > wmax:
                        raise OutOfBoundsError(
                            f"{name} entry {c} exceeds quantized range +-{wmax}"
                        )
        if self.score_bound < compute_score_bound(self, self.quant.input_max):
            raise ValidationError("declared score_bound is below the achievable maximum")

    @property
    def n(self):
        return len(self.p_mat[0]) - 1

    @property
    def d(self):
        return len(self.p_mat)

    @property
    def ell(self):
        return len(self.diag)

    def function_class(self) -> FunctionClass:
        """Function class of the bias-augmented encryption space."""
        x_max = max(1, self.quant.input_max)
        return FunctionClass(
            n=self.n + 1, b_x=x_max, b_y=x_max, b_q=max(1, self.quant.weight_max)
        )


@dataclass
class PairingCache:
    """Per-ciphertext pairing results reused across every class score."""

    cross_terms: list  # d GT elements e(a'_k, b'_k)
    c_gamma: object    # retained G1 element for the per-class key pairing


def keygen_model(msk: MasterSecretKey, model: QuadModel, ctx):
    """One functional key per class, for the form diag(D_i) after P."""
    if msk.n != model.n + 1:
        raise DimensionError(
            f"master secret dimension {msk.n} does not match model n+1={model.n + 1}"
        )
    proj = ProjectionPair(model.p_mat, model.p_mat)
    keys = []
    for diag in model.diag:
        coeffs = [[diag[k] if k == j else 0 for j in range(model.d)] for k in range(model.d)]
        keys.append(projected_keygen(msk, proj, QuadraticForm(coeffs), ctx))
    return keys


def encrypt_input(pk, x, fc: FunctionClass, rng=None) -> Ciphertext:
    """Encrypt the bias-augmented pair ((1, x), (1, x))."""
    if len(x) != fc.n - 1:
        raise DimensionError(f"expected {fc.n - 1} input values, got {len(x)}")
    for i, v in enumerate(x):
        if not 0 <= int(v) <= fc.b_x:
            raise OutOfBoundsError(f"input[{i}]={v} outside [0, {fc.b_x}]")
    augmented = (1,) + tuple(int(v) for v in x)
    return encrypt(pk, augmented, augmented, fc, rng)


def build_pairing_cache(ctx, pct) -> PairingCache:
    """Pair each projected coordinate pair with itself: 2d pairings."""
    cross = [
        ctx.multi_pair([(ak, bk) for ak, bk in zip(a_pair, b_pair)])
        for a_pair, b_pair in zip(pct.a, pct.b)
    ]
    return PairingCache(cross_terms=cross, c_gamma=pct.c_gamma)


def infer_encrypted(pk, ct, keys, model: QuadModel, table, timings=None):
    """Decrypt the l class scores of an encrypted input.

    Total pairings: 2d for the shared cross terms plus one key pairing
    per class, independent of how many classes reuse the cache.
    """
    ctx = pk.group
    if len(keys) != model.ell:
        raise DimensionError(f"expected {model.ell} keys, got {len(keys)}")
    if ct.n != model.n + 1:
        raise DimensionError("ciphertext dimension does not match the model")
    if table.bound < model.score_bound:
        raise ValidationError(
            f"dlog table bound {table.bound} below model score bound {model.score_bound}"
        )
    t0 = time.perf_counter()
    pct = project(ct, ProjectionPair(model.p_mat, model.p_mat), ctx)
    cache = build_pairing_cache(ctx, pct)
    targets = []
    for key, diag in zip(keys, model.diag):
        acc = ctx.pair(cache.c_gamma, key.k)
        for coeff, cross in zip(diag, cache.cross_terms):
            if coeff:
                acc = ctx.mul(acc, ctx.exp(GT, cross, coeff))
        targets.append(acc)
    t1 = time.perf_counter()
    scores = [table.solve(t) for t in targets]
    t2 = time.perf_counter()
    if timings is not None:
        timings["evaluation_s"] = t1 - t0
        timings["dlog_s"] = t2 - t1
    return scores


def infer_plaintext_oracle(model: QuadModel, x):
    """Exact integer reference: z_i = (Px')^T D_i (Px')."""
    if len(x) != model.n:
        raise DimensionError(f"expected {model.n} input values, got {len(x)}")
    aug = (1,) + tuple(int(v) for v in x)
    hidden = [sum(c * v for c, v in zip(row, aug)) for row in model.p_mat]
    return [sum(dk * h * h for dk, h in zip(diag, hidden)) for diag in model.diag]


def argmax(scores) -> int:
    """Smallest index attaining the maximum score."""
    if not scores:
        raise ValidationError("empty score vector")
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best
