"""Regenerate the committed end-to-end fixture under tests/fixtures/.

The fixture is a quantized 784-input model with 40 hidden units and 4
classes, a 28x28 grayscale input, and the exact integer score vector
computed by the plaintext oracle.  The projection rows are sparse (three
pixel taps plus a bias) so the worst-case score bound stays small enough
for a fast discrete-log table.  Deterministic: fixed seed, no torch.
"""

import json
import pathlib
import random

from quadfe import model_io, quadnet
from quadfe.cli import write_pgm
from quadfe.quantize import quantize_input, quantize_model, score_bound

SEED = 20240817
N, D, ELL = 784, 40, 4

out_dir = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"
out_dir.mkdir(parents=True, exist_ok=True)

rng = random.Random(SEED)

p_real = [[0.0] * (N + 1) for _ in range(D)]
for row in p_real:
    row[0] = rng.uniform(-1.0, 1.0)
    for j in rng.sample(range(1, N + 1), 3):
        row[j] = rng.uniform(-1.0, 1.0)
d_real = [[rng.uniform(-1.0, 1.0) for _ in range(D)] for _ in range(ELL)]

p_int, diag_int, meta = quantize_model(p_real, d_real, bits=4, input_bits=4)
probe = type("_Probe", (), {"p_mat": p_int.tolist(), "diag": diag_int.tolist()})()
model = quadnet.QuadModel(
    p_mat=p_int.tolist(),
    diag=diag_int.tolist(),
    quant=meta,
    score_bound=score_bound(probe, meta.input_max),
)

pixels = [rng.randrange(256) for _ in range(N)]
scores = quadnet.infer_plaintext_oracle(model, quantize_input(pixels, meta.input_bits))

model_io.save_model(model, out_dir / "golden_model.qmodel")
write_pgm(out_dir / "golden_input.pgm", pixels, 28, 28)
(out_dir / "golden_scores.json").write_text(
    json.dumps({"argmax": quadnet.argmax(scores), "scores": scores}, indent=1) + "\n"
)
print(f"score_bound={model.score_bound} scores={scores}")
