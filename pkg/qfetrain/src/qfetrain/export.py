"""Quantized integer export of a trained state, plus its integer oracle.

The quantizer mirrors the inference toolkit's scheme exactly: symmetric
per-tensor uniform quantization with scale (2^(bits-1) - 1) / max|w| and
round-half-to-even.  The integer oracle computes the exact class scores
the encrypted pipeline must decrypt, so exported fixtures are
bit-checkable across components.
"""

import numpy as np
import torch

from .modelfile import write_model


def quantize_tensor(w, bits):
    w = np.asarray(w, dtype=np.float64)
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    scale = ((1 << (bits - 1)) - 1) / peak if peak > 0.0 else 1.0
    return np.rint(w * scale).astype(np.int64), scale


def score_bound(p_int, diag_int, input_max) -> int:
    """Exact worst-case |score| over in-range inputs (bias input fixed at 1)."""
    input_max = int(input_max)
    peaks = [
        abs(int(row[0])) + sum(abs(int(c)) * input_max for c in row[1:])
        for row in p_int
    ]
    return max(
        sum(abs(int(dk)) * pk * pk for dk, pk in zip(diag, peaks))
        for diag in diag_int
    )


def integer_oracle(p_int, diag_int, x_levels):
    """Exact integer class scores for quantized input levels."""
    aug = [1] + [int(v) for v in x_levels]
    h = [sum(int(c) * v for c, v in zip(row, aug)) for row in p_int]
    return [
        sum(int(dk) * hk * hk for dk, hk in zip(diag, h)) for diag in diag_int
    ]


def quantized_tensors(state, bits=4):
    """Integer projection/diagonals of the trained private layer.

    The float network already consumes raw levels and rescales internally,
    so its parameter tensors quantize directly; integer scores are then a
    positive multiple of the float scores (see :func:`dequantize_scores`),
    preserving the argmax.
    """
    with torch.no_grad():
        p_real = (state.private.proj * state.private.mask).numpy().copy()
        d_real = state.private.diag.numpy().copy()
    p_int, scale_p = quantize_tensor(p_real, bits)
    diag_int, scale_d = quantize_tensor(d_real, bits)
    return p_int, diag_int, scale_p, scale_d


def dequantize_scores(scores_int, scale_p, scale_d, input_bits=4):
    """Map integer pipeline scores back to the float network's scale."""
    input_max = (1 << input_bits) - 1
    return np.asarray(scores_int, dtype=np.float64) / (
        scale_p * scale_p * scale_d * input_max * input_max
    )


def public_head_description(state):
    """Float public-head weights in the model file's head section."""
    layers = []
    tensors = {}
    idx = 0
    for mod in state.head:
        if isinstance(mod, torch.nn.Linear):
            tensors[f"head_w{idx}"] = mod.weight.detach().numpy()
            tensors[f"head_b{idx}"] = mod.bias.detach().numpy()
            layers.append(mod.out_features)
            idx += 1
    return {"activation": "relu", "layers": layers, "tensors": tensors}


def export_model(state, bits=4, input_bits=4, include_head=True) -> bytes:
    """Serialize the quantized private layer as a model file."""
    p_int, diag_int, scale_p, scale_d = quantized_tensors(state, bits)
    bound = score_bound(p_int, diag_int, (1 << input_bits) - 1)
    head = public_head_description(state) if include_head else None
    return write_model(
        p_int, diag_int, bits=bits, input_bits=input_bits,
        scale_p=scale_p, scale_d=scale_d, score_bound=bound,
        public_head=head,
    )


def quantized_argmax(state, x_levels_batch, bits=4):
    """Integer-pipeline head-free prediction: argmax over oracle scores.

    Useful for checking that quantization preserves the float layer's
    behaviour; the full pipeline applies the public head on top.
    """
    p_int, diag_int, _, _ = quantized_tensors(state, bits)
    return np.array([
        int(np.argmax(integer_oracle(p_int, diag_int, x))) for x in x_levels_batch
    ])
