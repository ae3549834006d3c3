"""End-to-end acceptance: leakage, defense, size trends, zoo resistance.

These tests train real networks on the procedural corpus, so the module
takes tens of minutes of CPU.  Expensive artifacts (pretrained nets per
output size, defended nets) are shared via module-scoped fixtures.
"""

import subprocess
import sys
import time

import numpy as np
import pytest
import torch

from qfetrain.adversary import (
    ZOO,
    collateral_attack,
    shuffled_baseline,
    zoo_eval,
)
from qfetrain.export import export_model, integer_oracle, quantized_tensors
from qfetrain.training import (
    compute_scores,
    defend,
    evaluate,
    make_state,
    pretrain,
)

SIZES = (2, 3, 4, 6, 10)
DEFENDED_SIZES = (3, 4, 5)
TREND_SEEDS = (0, 1, 2)
SEED = 1


def all_scores_and_labels(state, split):
    x = torch.cat([split.x_train, split.x_test])
    y = np.concatenate([split.y_priv_train.numpy(), split.y_priv_test.numpy()])
    return compute_scores(state.private, x), y


@pytest.fixture(scope="module")
def undefended(split):
    """Pretrained (undefended) networks and their CNN leakage, per size.

    Trained accuracies at one size fluctuate by about a point between
    seeds, so the per-size figures are means over three seeds; the
    seed-SEED run of each size is kept for the tests that need a concrete
    network.
    """
    out = {}
    for size in SIZES:
        mains, colls, states = [], [], {}
        for seed in TREND_SEEDS:
            state = make_state(size, seed=seed)
            pretrain(state, split)
            main, _ = evaluate(state, split)
            scores, y = all_scores_and_labels(state, split)
            report = collateral_attack(scores, y, spec="cnn", folds=5, seed=0)
            mains.append(main)
            colls.append(report.accuracy)
            states[seed] = (state, scores, y)
        out[size] = {
            "states": states,
            "main": float(np.mean(mains)),
            "collateral": float(np.mean(colls)),
        }
        print(f"\n[undefended size={size}] main={out[size]['main']:.3f} "
              f"collateral={out[size]['collateral']:.3f} "
              f"(per-seed mains={['%.3f' % m for m in mains]}, "
              f"collaterals={['%.3f' % c for c in colls]})")
    return out


@pytest.fixture(scope="module")
def defended(split):
    """Full three-phase defended networks at the window sizes."""
    out = {}
    for size in DEFENDED_SIZES:
        state = make_state(size, seed=SEED)
        start = time.time()
        base_main, base_coll = defend(state, split)
        elapsed = time.time() - start
        main, _ = evaluate(state, split)
        scores, y = all_scores_and_labels(state, split)
        report = collateral_attack(scores, y, spec="cnn", folds=7, seed=0)
        out[size] = {
            "state": state, "baseline_main": base_main, "main": main,
            "collateral": report.accuracy, "scores": scores, "y": y,
            "train_seconds": elapsed,
        }
        print(f"\n[defended size={size}] baseline={base_main:.3f} "
              f"main={main:.3f} collateral={report.accuracy:.3f} "
              f"({elapsed:.0f}s)")
    return out


def test_undefended_network_leaks_covert_label(undefended):
    """A 10-output private layer hands the font to the reference CNN."""
    _state, scores, y = undefended[10]["states"][SEED]
    report = collateral_attack(scores, y, spec="cnn", folds=7, seed=0)
    print(f"\n[leakage] undefended size-10 CNN collateral = {report.accuracy:.3f}")
    assert report.accuracy >= 0.85, report.accuracy


def test_defense_suppresses_leak_and_keeps_main_task(defended):
    """Size 4: defended collateral <= 65%, main within 3 points, <= 30 min."""
    run = defended[4]
    drop = run["baseline_main"] - run["main"]
    print(f"\n[defense] baseline={run['baseline_main']:.3f} "
          f"main={run['main']:.3f} drop={100 * drop:.1f}pt "
          f"collateral={run['collateral']:.3f} "
          f"time={run['train_seconds']:.0f}s")
    assert run["collateral"] <= 0.65, run["collateral"]
    assert drop <= 0.030 + 1e-9, drop
    assert run["train_seconds"] <= 1800, run["train_seconds"]


def test_accuracies_grow_with_output_size(undefended):
    """Main and collateral both non-decreasing in size (1-point slack)."""
    mains = [undefended[s]["main"] for s in SIZES]
    colls = [undefended[s]["collateral"] for s in SIZES]
    print(f"\n[trend] mains={['%.3f' % m for m in mains]} "
          f"collaterals={['%.3f' % c for c in colls]}")
    for prev, nxt in zip(mains, mains[1:]):
        assert nxt >= prev - 0.010, (mains,)
    for prev, nxt in zip(colls, colls[1:]):
        assert nxt >= prev - 0.010, (colls,)


def test_window_of_useful_sizes_exists(undefended, defended):
    """Some defended size in 3-5 keeps main high with collateral well below
    the undefended leakage ceiling."""
    best_main = max(defended[s]["main"] for s in DEFENDED_SIZES)
    ceiling = undefended[10]["collateral"]
    window = [
        s for s in DEFENDED_SIZES
        if defended[s]["main"] >= best_main - 0.020
        and defended[s]["collateral"] <= ceiling - 0.15
    ]
    print(f"\n[window] sizes={window} best_main={best_main:.3f} "
          f"undefended_ceiling={ceiling:.3f}")
    assert window, {
        s: (defended[s]["main"], defended[s]["collateral"])
        for s in DEFENDED_SIZES
    }


def test_zoo_cannot_beat_defended_network(defended):
    """Every zoo adversary stays at or below 70% on the defended scores."""
    run = defended[4]
    reports = zoo_eval(run["scores"], run["y"], folds=7, seed=0)
    for r in reports:
        print(f"\n[zoo] {r.name}: {r.accuracy:.3f} +- {r.std:.3f}")
        assert r.accuracy <= 0.70, (r.name, r.accuracy)


def test_zoo_chance_calibration(defended):
    """On shuffled covert labels every zoo adversary sits at 50% +- 5."""
    run = defended[4]
    for spec in ZOO:
        report = shuffled_baseline(run["scores"], run["y"], spec, folds=5, seed=3)
        print(f"\n[calibration] {spec}: {report.accuracy:.3f}")
        assert abs(report.accuracy - 0.5) <= 0.05, (spec, report.accuracy)


def test_exported_model_runs_in_encrypted_pipeline(defended, dataset, tmp_path):
    """The defended network, exported to the model format, produces the
    same integer scores through the encrypted CLI pipeline (keygen ->
    enc -> infer) as the trainer's own integer oracle."""
    import json

    run = defended[4]
    state = run["state"]
    model_path = tmp_path / "defended.qmodel"
    model_path.write_bytes(export_model(state, bits=4))

    from quadfe.cli import write_pgm

    image = dataset.images[0]
    pgm = tmp_path / "img.pgm"
    write_pgm(pgm, image.reshape(-1).tolist(), 28, 28)

    def cli(*args):
        res = subprocess.run(
            [sys.executable, "-m", "quadfe.cli", *args],
            capture_output=True, text=True,
        )
        assert res.returncode == 0, res.stderr + res.stdout
        return res.stdout

    cli("keygen", "--model", str(model_path), "--out-dir", str(tmp_path / "keys"))
    cli("enc", "--pk", str(tmp_path / "keys" / "pk.qpk"),
        "--image", str(pgm), "--out", str(tmp_path / "img.qct"))
    out = cli("infer", "--pk", str(tmp_path / "keys" / "pk.qpk"),
              "--ct", str(tmp_path / "img.qct"),
              "--keys", str(tmp_path / "keys"),
              "--model", str(model_path), "--json")

    p_int, diag_int, _, _ = quantized_tensors(state, bits=4)
    levels = (image.astype(np.int64) >> 4).reshape(-1)
    expected = integer_oracle(p_int, diag_int, levels)
    got = json.loads(out)
    print(f"\n[pipeline] scores={got['scores']}")
    assert got["scores"] == expected
    assert got["argmax"] == int(np.argmax(expected))
