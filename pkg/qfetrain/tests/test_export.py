"""Quantized export fidelity, checked against the inference toolkit."""

import numpy as np
import pytest
import torch

import quadfe.model_io as qio
import quadfe.quantize as qquant
from quadfe.quadnet import infer_plaintext_oracle
from qfetrain.export import (
    dequantize_scores,
    export_model,
    integer_oracle,
    quantize_tensor,
    quantized_argmax,
    quantized_tensors,
    score_bound,
)
from qfetrain.training import evaluate, make_state, pretrain


@pytest.fixture(scope="module")
def trained(split):
    state = make_state(4, seed=9)
    pretrain(state, split, adv_epochs=2)
    return state, split


def test_quantize_tensor_matches_toolkit(rng):
    w = rng.normal(size=(5, 9))
    ours, scale = quantize_tensor(w, 4)
    p_int, d_int, meta = qquant.quantize_model(w.tolist(), [[1.0]], bits=4)
    assert np.array_equal(ours, np.asarray(p_int))
    assert scale == pytest.approx(meta.scale_p)


def test_integer_oracle_matches_toolkit(rng):
    p_int = rng.integers(-7, 8, size=(4, 7))
    diag_int = rng.integers(-7, 8, size=(3, 4))
    model = qio.QuadModel(
        p_mat=p_int.tolist(), diag=diag_int.tolist(),
        quant=qio.QuantMeta(bits=4, input_bits=4),
        score_bound=10**9,
    )
    for _ in range(20):
        x = rng.integers(0, 16, size=6)
        assert integer_oracle(p_int, diag_int, x) == list(
            infer_plaintext_oracle(model, x.tolist())
        )


def test_score_bound_matches_toolkit(rng):
    p_int = rng.integers(-7, 8, size=(4, 7))
    diag_int = rng.integers(-7, 8, size=(3, 4))
    ours = score_bound(p_int, diag_int, 15)
    model = qio.QuadModel(
        p_mat=p_int.tolist(), diag=diag_int.tolist(),
        quant=qio.QuantMeta(bits=4, input_bits=4),
        score_bound=ours,  # construction validates it is not an underestimate
    )
    assert ours == qquant.score_bound(model, 15)


def test_score_bound_dominates_samples(rng):
    p_int = rng.integers(-7, 8, size=(4, 9))
    diag_int = rng.integers(-7, 8, size=(2, 4))
    bound = score_bound(p_int, diag_int, 15)
    for _ in range(200):
        x = rng.integers(0, 16, size=8)
        assert all(abs(z) <= bound for z in integer_oracle(p_int, diag_int, x))


def test_dequantized_scores_track_float_net(trained):
    state, small = trained
    p_int, diag_int, scale_p, scale_d = quantized_tensors(state, bits=16)
    x = small.x_test[:32]
    with torch.no_grad():
        state.private.qat_bits = None
        float_scores = state.private(x).numpy()
        state.private.qat_bits = state.qat_bits
    ints = np.array([
        integer_oracle(p_int, diag_int, row.numpy().astype(np.int64))
        for row in x
    ], dtype=np.float64)
    approx = dequantize_scores(ints, scale_p, scale_d)
    err = np.abs(approx - float_scores).max() / (np.abs(float_scores).max() + 1e-12)
    assert err < 1e-3, err


def test_wide_quantization_preserves_argmax(trained):
    state, small = trained
    with torch.no_grad():
        state.private.qat_bits = None
        float_pred = state.private(small.x_test).argmax(1).numpy()
        state.private.qat_bits = state.qat_bits
    int_pred = quantized_argmax(state, small.x_test.numpy().astype(np.int64), bits=16)
    assert (int_pred == float_pred).mean() >= 0.99


def test_four_bit_quantization_costs_at_most_one_point(trained):
    """QAT keeps the 4-bit network within 1 point of its float baseline.

    The baseline is the held-out accuracy logged at the end of the float
    stage of pretraining, just before clipping and grid snapping start.
    """
    state, small = trained
    float_rows = [r for r in state.history if r["phase"] == "pretrain"]
    main_float = float_rows[19]["main_acc"]  # default float stage: 20 epochs
    main_qat, _ = evaluate(state, small)
    assert main_qat >= main_float - 0.010, (main_qat, main_float)


def test_export_loads_and_matches_tensors(trained, tmp_path):
    state, _ = trained
    blob = export_model(state, bits=4)
    path = tmp_path / "trained.qfe"
    path.write_bytes(blob)
    model, head = qio.load_model(str(path))
    p_int, diag_int, scale_p, scale_d = quantized_tensors(state, bits=4)
    assert np.array_equal(np.asarray(model.p_mat), p_int)
    assert np.array_equal(np.asarray(model.diag), diag_int)
    assert model.quant.scale_p == pytest.approx(scale_p)
    assert model.score_bound == score_bound(p_int, diag_int, 15)
    # declared bound matches the toolkit's own recomputation
    assert model.score_bound == qquant.score_bound(model, 15)
    assert head["activation"] == "relu"
    assert head["layers"] == [64, 32, 10]


def test_exported_weights_in_declared_range(trained):
    state, _ = trained
    p_int, diag_int, _, _ = quantized_tensors(state, bits=4)
    assert np.abs(p_int).max() <= 7
    assert np.abs(diag_int).max() <= 7
    # sparsity of the projection survives quantization (masked entries stay 0)
    mask = state.private.mask.numpy()
    assert np.all(p_int[mask == 0] == 0)
