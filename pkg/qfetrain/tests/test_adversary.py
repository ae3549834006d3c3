"""Attack-suite mechanics: calibration, folds, and read-only contracts."""

import numpy as np
import pytest

from qfetrain.adversary import (
    ZOO,
    AttackReport,
    collateral_attack,
    distinction_game,
    make_adversary,
    report_csv,
    report_markdown,
    shuffled_baseline,
    zoo_eval,
)


def separable_scores(rng, n=400, dim=4, gap=3.0):
    y = rng.integers(0, 2, size=n)
    x = rng.normal(size=(n, dim))
    x[:, 0] += gap * y
    return x, y


def random_scores(rng, n=1000, dim=4):
    return rng.normal(size=(n, dim)), rng.integers(0, 2, size=n)


@pytest.mark.parametrize("spec", ZOO + ("cnn",))
def test_chance_on_unrelated_labels(spec, rng):
    """No adversary should beat chance when scores carry no label signal."""
    x, y = random_scores(rng)
    report = collateral_attack(x, y, spec=spec, folds=5, seed=1)
    assert abs(report.accuracy - 0.5) <= 0.05, (spec, report.accuracy)


@pytest.mark.parametrize("spec", ZOO)
def test_recovers_separable_signal(spec, rng):
    x, y = separable_scores(rng)
    report = collateral_attack(x, y, spec=spec, folds=5, seed=1)
    assert report.accuracy >= 0.9, (spec, report.accuracy)
    assert len(report.fold_accuracies) == 5
    assert report.std < 0.2


def test_shuffled_baseline_is_chance(rng):
    x, y = separable_scores(rng, n=1000)
    strong = collateral_attack(x, y, spec="logreg", folds=5, seed=1)
    shuffled = shuffled_baseline(x, y, spec="logreg", folds=5, seed=1)
    assert strong.accuracy >= 0.9
    assert abs(shuffled.accuracy - 0.5) <= 0.05


def test_kfold_rejects_too_few_samples(rng):
    x, y = random_scores(rng, n=4)
    with pytest.raises(ValueError, match="folds"):
        collateral_attack(x, y, spec="logreg", folds=7)


def test_unknown_spec_rejected(rng):
    with pytest.raises(ValueError, match="unknown adversary"):
        make_adversary("oracle", 4)


def test_distinction_game_per_digit(rng):
    y_pub = rng.integers(0, 3, size=600)
    x, y_priv = separable_scores(rng, n=600)
    # erase the signal for digits 1 and 2; only digit 0 remains attackable
    x[y_pub != 0, 0] = rng.normal(size=int((y_pub != 0).sum()))
    report = distinction_game(x, y_pub, y_priv, spec="logreg", folds=5, seed=1)
    assert set(report.per_digit) == {0, 1, 2}
    assert report.per_digit[0] >= 0.85
    assert report.accuracy == max(report.per_digit.values())


def test_distinction_game_rejects_sparse_digit(rng):
    x, y_priv = separable_scores(rng, n=100)
    y_pub = np.zeros(100, dtype=np.int64)
    y_pub[:3] = 1  # 3 samples of digit 1 cannot support 5 folds
    with pytest.raises(ValueError, match="digit 1"):
        distinction_game(x, y_pub, y_priv, spec="logreg", folds=5)


def test_zoo_eval_reports(rng):
    x, y = separable_scores(rng, n=200)
    reports = zoo_eval(x, y, folds=4, seed=2)
    assert [r.name for r in reports] == list(ZOO)
    for r in reports:
        assert isinstance(r, AttackReport)


def test_report_serialization(rng, tmp_path):
    x, y = separable_scores(rng, n=200)
    reports = zoo_eval(x, y, folds=4, seed=2)
    path = tmp_path / "attacks.csv"
    report_csv(reports, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "adversary,accuracy,std,param_count"
    assert len(lines) == len(reports) + 1
    md = report_markdown(reports)
    assert md.count("\n") == len(reports) + 1


def test_report_invariants():
    with pytest.raises(AssertionError):
        AttackReport("x", 1.2, 0.0, [1.0, 1.0, 1.0], 0)
    with pytest.raises(AssertionError):
        AttackReport("x", 0.5, 0.0, [0.5], 0)
