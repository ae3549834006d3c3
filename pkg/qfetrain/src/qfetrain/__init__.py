"""Training pipeline and leakage-evaluation suite for quadratic networks.

The package trains a quadratic private layer (projection + per-class
diagonals) together with a plaintext public head, hardens the private
layer against collateral learning with semi-adversarial training, and
exports the result in the integer model file format consumed by the
encrypted-inference toolkit.  It talks to that toolkit only through
files and its command line.
"""

from .dataset import TwoLabelDataset, generate_dataset
from .training import TrainState, adversarial_phase, make_state, pretrain, recover_phase

__all__ = [
    "TwoLabelDataset",
    "generate_dataset",
    "TrainState",
    "make_state",
    "pretrain",
    "adversarial_phase",
    "recover_phase",
]
