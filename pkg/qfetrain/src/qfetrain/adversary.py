"""Collateral-leakage evaluation of a frozen private layer.

All attacks are read-only: they consume the decrypted score vectors and
the covert labels, never the private parameters.  The suite covers the
reference CNN attacker, the per-digit distinction game, and a reduced
adversary zoo (hand-rolled logistic regression and k-NN, a random
forest, and two feed-forward sizes), each cross-validated.
"""

from dataclasses import dataclass, field

import numpy as np
import torch
from sklearn.ensemble import RandomForestClassifier
from torch import nn

from .networks import ScoreAdversary


@dataclass
class AttackReport:
    name: str
    accuracy: float
    std: float
    fold_accuracies: list
    param_count: int
    per_digit: dict = field(default_factory=dict)

    def __post_init__(self):
        assert 0.0 <= self.accuracy <= 1.0
        assert len(self.fold_accuracies) >= 3


def _kfold(n, folds, seed):
    if n < folds:
        raise ValueError(f"{n} samples cannot be split into {folds} folds")
    order = np.random.default_rng(seed).permutation(n)
    parts = np.array_split(order, folds)
    for i in range(folds):
        test = parts[i]
        train = np.concatenate([parts[j] for j in range(folds) if j != i])
        yield train, test


class _Standardizer:
    def fit(self, x):
        self.mean = x.mean(axis=0)
        self.std = x.std(axis=0) + 1e-9
        return self

    def apply(self, x):
        return (x - self.mean) / self.std


class LogisticRegressionGD:
    """Hand-rolled binary logistic regression (gradient descent)."""

    def __init__(self, iters=400, lr=0.5):
        self.iters, self.lr = iters, lr

    @property
    def param_count(self):
        return len(self.w) + 1

    def fit(self, x, y):
        self.scaler = _Standardizer().fit(x)
        x = self.scaler.apply(x)
        n, d = x.shape
        self.w = np.zeros(d)
        self.b = 0.0
        for _ in range(self.iters):
            z = x @ self.w + self.b
            p = 1.0 / (1.0 + np.exp(-z))
            grad = p - y
            self.w -= self.lr * (x.T @ grad) / n
            self.b -= self.lr * grad.mean()
        return self

    def predict(self, x):
        x = self.scaler.apply(x)
        return (x @ self.w + self.b > 0).astype(np.int64)


class KNearest:
    """Hand-rolled k-nearest-neighbours on standardized scores."""

    def __init__(self, k=5):
        self.k = k

    param_count = 0

    def fit(self, x, y):
        self.scaler = _Standardizer().fit(x)
        self.x = self.scaler.apply(x)
        self.y = y
        return self

    def predict(self, x):
        x = self.scaler.apply(x)
        d2 = ((x[:, None, :] - self.x[None, :, :]) ** 2).sum(-1)
        nearest = np.argpartition(d2, self.k, axis=1)[:, :self.k]
        votes = self.y[nearest]
        return (votes.mean(axis=1) > 0.5).astype(np.int64)


class _TorchClassifier:
    def __init__(self, build, epochs, seed, batch_size=128, lr=1e-3):
        self.build, self.epochs, self.seed = build, epochs, seed
        self.batch_size, self.lr = batch_size, lr

    def fit(self, x, y):
        torch.manual_seed(self.seed)
        self.net = self.build()
        self.scaler = _Standardizer().fit(x)
        xt = torch.tensor(self.scaler.apply(x), dtype=torch.float32)
        yt = torch.tensor(y)
        opt = torch.optim.Adam(self.net.parameters(), lr=self.lr)
        ce = nn.CrossEntropyLoss()
        gen = torch.Generator().manual_seed(self.seed)
        for _ in range(self.epochs):
            order = torch.randperm(len(xt), generator=gen)
            for i in range(0, len(xt), self.batch_size):
                idx = order[i:i + self.batch_size]
                loss = ce(self.net(xt[idx]), yt[idx])
                opt.zero_grad()
                loss.backward()
                opt.step()
        return self

    @property
    def param_count(self):
        return sum(p.numel() for p in self.net.parameters())

    def predict(self, x):
        xt = torch.tensor(self.scaler.apply(x), dtype=torch.float32)
        with torch.no_grad():
            return self.net(xt).argmax(1).numpy()


class _ForestAdapter:
    def __init__(self, seed):
        self.model = RandomForestClassifier(n_estimators=100, random_state=seed)

    def fit(self, x, y):
        self.model.fit(x, y)
        return self

    @property
    def param_count(self):
        return sum(t.tree_.node_count for t in self.model.estimators_)

    def predict(self, x):
        return self.model.predict(x)


def make_adversary(spec, score_dim, seed=0):
    if spec == "cnn":
        return _TorchClassifier(
            lambda: ScoreAdversary(score_dim), epochs=12, seed=seed,
        )
    if spec == "logreg":
        return LogisticRegressionGD()
    if spec == "knn":
        return KNearest()
    if spec == "rf":
        return _ForestAdapter(seed)
    if spec == "ffn_small":
        return _TorchClassifier(
            lambda: nn.Sequential(nn.Linear(score_dim, 16), nn.ReLU(), nn.Linear(16, 2)),
            epochs=60, seed=seed, lr=5e-3,
        )
    if spec == "ffn_large":
        return _TorchClassifier(
            lambda: nn.Sequential(
                nn.Linear(score_dim, 128), nn.ReLU(),
                nn.Linear(128, 64), nn.ReLU(), nn.Linear(64, 2),
            ),
            epochs=60, seed=seed, lr=2e-3,
        )
    raise ValueError(f"unknown adversary spec {spec!r}")


def collateral_attack(scores, labels_priv, spec="cnn", folds=7, seed=0) -> AttackReport:
    """Cross-validated covert-label accuracy of one adversary."""
    scores = np.asarray(scores, dtype=np.float64)
    labels_priv = np.asarray(labels_priv)
    accs, params = [], 0
    for fold, (tr, te) in enumerate(_kfold(len(scores), folds, seed)):
        adv = make_adversary(spec, scores.shape[1], seed=seed + fold)
        adv.fit(scores[tr], labels_priv[tr])
        accs.append(float((adv.predict(scores[te]) == labels_priv[te]).mean()))
        params = adv.param_count
    return AttackReport(
        name=spec,
        accuracy=float(np.mean(accs)),
        std=float(np.std(accs)),
        fold_accuracies=accs,
        param_count=params,
    )


def distinction_game(scores, labels_pub, labels_priv, spec="cnn", folds=5, seed=0):
    """Per-digit font distinction; the adversary's best case is the max."""
    scores = np.asarray(scores, dtype=np.float64)
    labels_pub = np.asarray(labels_pub)
    labels_priv = np.asarray(labels_priv)
    per_digit = {}
    for digit in sorted(set(labels_pub.tolist())):
        idx = np.flatnonzero(labels_pub == digit)
        if len(idx) < 2 * folds:
            raise ValueError(f"digit {digit}: only {len(idx)} samples for {folds} folds")
        report = collateral_attack(
            scores[idx], labels_priv[idx], spec=spec, folds=folds, seed=seed,
        )
        per_digit[int(digit)] = report.accuracy
    best_digit = max(per_digit, key=per_digit.get)
    return AttackReport(
        name=f"{spec}/distinction",
        accuracy=per_digit[best_digit],
        std=0.0,
        fold_accuracies=[per_digit[best_digit]] * 3,
        param_count=0,
        per_digit=per_digit,
    )


ZOO = ("logreg", "knn", "rf", "ffn_small", "ffn_large")


def zoo_eval(scores, labels_priv, folds=7, seed=0):
    """The reduced adversary zoo, one report per member."""
    return [
        collateral_attack(scores, labels_priv, spec=spec, folds=folds, seed=seed)
        for spec in ZOO
    ]


def shuffled_baseline(scores, labels_priv, spec, folds=5, seed=0):
    """Chance calibration: the same adversary on permuted covert labels."""
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(np.asarray(labels_priv))
    return collateral_attack(scores, shuffled, spec=spec, folds=folds, seed=seed)


def report_csv(reports, path):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["adversary", "accuracy", "std", "param_count"])
        for r in reports:
            writer.writerow([r.name, f"{r.accuracy:.4f}", f"{r.std:.4f}", r.param_count])


def report_markdown(reports):
    lines = ["| adversary | accuracy | std | params |", "|---|---|---|---|"]
    for r in reports:
        lines.append(
            f"| {r.name} | {r.accuracy:.3f} | {r.std:.3f} | {r.param_count} |"
        )
    return "\n".join(lines)
