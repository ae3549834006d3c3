"""Model components: quadratic private layer, public head, score adversary."""

import hashlib

import torch
from torch import nn


def fake_quantize(w, bits):
    """Straight-through symmetric fake quantization (round half to even)."""
    peak = w.abs().max().detach()
    if peak == 0:
        return w
    scale = ((1 << (bits - 1)) - 1) / peak
    snapped = torch.round(w * scale) / scale
    return w + (snapped - w).detach()


class QuadraticPrivate(nn.Module):
    """Projection + per-output diagonal quadratic layer.

    Computes z_i = (P x')^T D_i (P x') with x' = (1, x) and diagonal D_i.
    The projection uses a fixed sparsity mask (``taps`` nonzero pixels per
    hidden unit, bias always active) so that the integer export keeps the
    worst-case output bound small enough for table-based decryption.  With
    ``qat_bits`` set, forward passes see the weights snapped to that
    integer grid (straight-through gradients), so the trained network is
    the one the quantized export actually ships.
    """

    def __init__(self, n_inputs, hidden, outputs, taps, generator, input_max=15,
                 qat_bits=None):
        super().__init__()
        self.n_inputs = n_inputs
        # inputs arrive as raw quantization levels; the projection divides by
        # their range so that the exported integer matrix is exactly this
        # parameter tensor (uniform quantization treatment for every column,
        # bias included) and integer scores are a positive multiple of these
        self.input_max = input_max
        self.qat_bits = qat_bits
        self.proj = nn.Parameter(
            0.5 * torch.randn(hidden, n_inputs + 1, generator=generator)
        )
        self.diag = nn.Parameter(
            0.5 * torch.randn(outputs, hidden, generator=generator)
        )
        mask = torch.zeros(hidden, n_inputs + 1)
        mask[:, 0] = 1.0
        for k in range(hidden):
            cols = torch.randperm(n_inputs, generator=generator)[:taps] + 1
            mask[k, cols] = 1.0
        self.register_buffer("mask", mask)
        # weight clipping bounds (0 = disabled), set when QAT starts so the
        # few outlier weights stop dictating the quantization step size
        self.register_buffer("clip_proj", torch.zeros(()))
        self.register_buffer("clip_diag", torch.zeros(()))

    def set_clipping(self, proj_quantile=0.90, diag_quantile=0.98, factor=1.3):
        """Freeze clipping bounds at a quantile of the active weights.

        The projection bound sits well below the weight peak: a handful of
        outlier weights would otherwise dictate the quantization step and
        push the bulk of the distribution onto very few integer levels.
        """
        with torch.no_grad():
            active = (self.proj * self.mask).abs()[self.mask > 0]
            self.clip_proj.fill_(factor * torch.quantile(active, proj_quantile))
            self.clip_diag.fill_(
                factor * torch.quantile(self.diag.abs(), diag_quantile)
            )
        self.apply_clipping()

    def apply_clipping(self):
        if float(self.clip_proj) > 0:
            with torch.no_grad():
                self.proj.clamp_(-float(self.clip_proj), float(self.clip_proj))
                self.diag.clamp_(-float(self.clip_diag), float(self.clip_diag))

    def forward(self, x):
        aug = torch.cat([torch.ones(len(x), 1, device=x.device), x], dim=1)
        proj, diag = self.proj * self.mask, self.diag
        if self.qat_bits is not None:
            proj = fake_quantize(proj, self.qat_bits)
            diag = fake_quantize(diag, self.qat_bits)
        h = (aug @ proj.t()) / self.input_max
        return (h * h) @ diag.t()


def make_head(outputs, classes=10):
    """Plaintext feed-forward head consuming the decrypted private scores."""
    # BatchNorm rather than any per-sample normalization: at small output
    # sizes a per-sample norm collapses the score vector (for two scores it
    # keeps only their ordering)
    return nn.Sequential(
        nn.BatchNorm1d(outputs),
        nn.Linear(outputs, 64),
        nn.ReLU(),
        nn.Linear(64, 32),
        nn.ReLU(),
        nn.Linear(32, classes),
    )


class ScoreAdversary(nn.Module):
    """Reference collateral attacker: decompress scores to an image, then CNN."""

    def __init__(self, score_dim):
        super().__init__()
        # per-feature normalization only: per-sample normalization (e.g.
        # LayerNorm) would hide the overall score scale from the simulated
        # adversary, and that scale is a primary covert-label channel
        self.norm = nn.BatchNorm1d(score_dim)
        self.decompress = nn.Linear(score_dim, 28 * 28)
        self.cnn = nn.Sequential(
            nn.Conv2d(1, 8, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(8, 16, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Flatten(),
            nn.Linear(16 * 7 * 7, 64),
            nn.ReLU(),
            nn.Linear(64, 2),
        )

    def forward(self, scores):
        img = self.decompress(self.norm(scores)).view(-1, 1, 28, 28)
        return self.cnn(img)


def param_digest(module) -> str:
    """Bit-exact fingerprint of a module's parameters (freeze contract)."""
    h = hashlib.sha256()
    for name, p in sorted(module.named_parameters()):
        h.update(name.encode())
        h.update(p.detach().cpu().numpy().tobytes())
    return h.hexdigest()
