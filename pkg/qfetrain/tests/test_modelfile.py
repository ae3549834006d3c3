"""Model-file writer against the inference toolkit's loader (the oracle)."""

import numpy as np
import pytest

import quadfe.model_io as qio
from qfetrain.export import score_bound
from qfetrain.modelfile import read_model, write_model


def small_model_bytes(rng, n=6, d=3, ell=2, head=False):
    p = rng.integers(-7, 8, size=(d, n + 1))
    diag = rng.integers(-7, 8, size=(ell, d))
    bound = score_bound(p, diag, 15)
    kwargs = {}
    if head:
        kwargs["public_head"] = {
            "activation": "relu",
            "layers": [4, 2],
            "tensors": {
                "head_w0": rng.normal(size=(4, ell)).astype(np.float32),
                "head_b0": rng.normal(size=(4,)).astype(np.float32),
                "head_w1": rng.normal(size=(2, 4)).astype(np.float32),
                "head_b1": rng.normal(size=(2,)).astype(np.float32),
            },
        }
    return p, diag, bound, write_model(
        p, diag, bits=4, input_bits=4, scale_p=1.25, scale_d=0.75,
        score_bound=bound, **kwargs,
    )


def test_loads_in_inference_toolkit(rng, tmp_path):
    p, diag, bound, blob = small_model_bytes(rng)
    path = tmp_path / "m.qfe"
    path.write_bytes(blob)
    model, head = qio.load_model(str(path))
    assert (model.n, model.d, model.ell) == (6, 3, 2)
    assert head is None
    assert np.array_equal(np.asarray(model.p_mat), p)
    assert np.array_equal(np.asarray(model.diag), diag)
    assert model.score_bound == bound
    assert model.quant.scale_p == pytest.approx(1.25)
    assert model.quant.bits == 4


def test_canonical_bytes_match_toolkit_writer(rng, tmp_path):
    """load + save through the toolkit reproduces our bytes exactly."""
    *_, blob = small_model_bytes(rng, head=True)
    path = tmp_path / "m.qfe"
    path.write_bytes(blob)
    model, head = qio.load_model(str(path))
    out = tmp_path / "resaved.qfe"
    qio.save_model(model, str(out), public_head=head)
    assert out.read_bytes() == blob


def test_head_tensors_survive_round_trip(rng, tmp_path):
    p, diag, bound, blob = small_model_bytes(rng, head=True)
    path = tmp_path / "m.qfe"
    path.write_bytes(blob)
    _model, head = qio.load_model(str(path))
    assert head["activation"] == "relu"
    assert head["layers"] == [4, 2]
    assert set(head["tensors"]) == {"head_w0", "head_b0", "head_w1", "head_b1"}
    assert head["tensors"]["head_w1"].shape == (2, 4)


def test_own_reader_round_trip(rng):
    p, diag, bound, blob = small_model_bytes(rng, head=True)
    header, arrays = read_model(blob)
    assert header["n"] == 6 and header["d"] == 3 and header["ell"] == 2
    assert np.array_equal(arrays["p_mat"], p)
    assert np.array_equal(arrays["diag"], diag)
    assert arrays["head_b0"].dtype == np.dtype("<f4")


def test_own_reader_rejects_corruption(rng):
    *_, blob = small_model_bytes(rng)
    with pytest.raises(ValueError, match="magic"):
        read_model(b"XXXX" + blob[4:])
    with pytest.raises(ValueError, match="truncated"):
        read_model(blob[:-3])
    with pytest.raises(ValueError, match="trailing"):
        read_model(blob + b"\0\0\0\0")
