import numpy as np
import pytest
import torch

from qfetrain import generate_dataset
from qfetrain.training import Split, prepare

# single-threaded: reproducible float reduction order, and the training
# tests were calibrated this way
torch.set_num_threads(1)


def tiny_split(split, n_train=400, n_test=200):
    """First slice of a prepared split, for fast training tests."""
    return Split(
        split.x_train[:n_train], split.y_pub_train[:n_train],
        split.y_priv_train[:n_train],
        split.x_test[:n_test], split.y_pub_test[:n_test],
        split.y_priv_test[:n_test],
    )


@pytest.fixture(scope="session")
def dataset():
    return generate_dataset(3000, seed=42)


@pytest.fixture(scope="session")
def split(dataset):
    return prepare(dataset)


@pytest.fixture
def rng():
    # function-scoped so each test sees the same deterministic stream
    return np.random.default_rng(12345)
