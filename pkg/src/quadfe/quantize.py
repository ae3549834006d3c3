"""Integer quantization of real-valued model weights and inputs.

Weights use symmetric per-tensor uniform quantization with round-half-
to-even; inputs are bit-shifted down from 8-bit grayscale.  The module
also computes the exact worst-case output bound used to size the
discrete-log table.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OutOfBoundsError, ValidationError


@dataclass(frozen=True)
class QuantMeta:
    """Quantization parameters carried alongside an integer model."""

    bits: int = 4
    input_bits: int = 4
    scale_p: float = 1.0
    scale_d: float = 1.0

    def __post_init__(self):
        if not 2 <= self.bits <= 16:
            raise ValidationError(f"weight bits must be in [2, 16], got {self.bits}")
        if not 1 <= self.input_bits <= 8:
            raise ValidationError(
                f"input bits must be in [1, 8], got {self.input_bits}"
            )

    @property
    def weight_max(self):
        return (1 << (self.bits - 1)) - 1

    @property
    def input_max(self):
        return (1 << self.input_bits) - 1


def _quantize_tensor(w, bits):
    w = np.asarray(w, dtype=np.float64)
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    scale = ((1 << (bits - 1)) - 1) / peak if peak > 0.0 else 1.0
    q = np.rint(w * scale).astype(np.int64)
    return q, scale


def quantize_model(p_real, d_real, bits=4, input_bits=4):
    """Quantize the projection matrix and the class diagonals.

    Returns (p_int, diag_int, meta) with integer numpy arrays; each tensor
    gets its own symmetric scale (2^(bits-1) - 1) / max|w|, rounding ties
    to even.
    """
    p_int, scale_p = _quantize_tensor(p_real, bits)
    diag_int, scale_d = _quantize_tensor(d_real, bits)
    meta = QuantMeta(bits=bits, input_bits=input_bits, scale_p=scale_p, scale_d=scale_d)
    return p_int, diag_int, meta


def quantize_input(pixels, input_bits=4):
    """Map 8-bit grayscale values to [0, 2^input_bits - 1] by right shift."""
    out = []
    shift = 8 - int(input_bits)
    for i, px in enumerate(pixels):
        px = int(px)
        if not 0 <= px <= 255:
            raise OutOfBoundsError(f"pixel[{i}]={px} outside [0, 255]")
        out.append(px >> shift)
    return out


def score_bound(model, input_max) -> int:
    """Largest |score| any in-range input can produce, exactly.

    For each hidden unit k the projected value is at most
    |P_k0| + sum_j |P_kj| * input_max (the bias input is fixed at 1), and
    each class score is the diagonal-weighted sum of their squares.
    Arbitrary-precision integers throughout, so no overflow.
    """
    input_max = int(input_max)
    row_peaks = [
        abs(int(row[0])) + sum(abs(int(c)) * input_max for c in row[1:])
        for row in model.p_mat
    ]
    best = 0
    for diag in model.diag:
        total = sum(abs(int(dk)) * peak * peak for dk, peak in zip(diag, row_peaks))
        best = max(best, total)
    return best
