"""Procedural two-label digit corpus.

Each sample is a 28x28 grayscale digit rendered from seven-segment
stroke geometry in one of two synthetic "fonts" (a thin upright family
and a thick slanted family), with a small random affine distortion and
pixel noise.  Every (digit, font) cell is balanced and the two labels
are independent by construction.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

_SS = 4  # supersampling factor for antialiased strokes
_SIZE = 28

# seven-segment endpoints in unit coordinates
_SEGMENTS = {
    "a": ((0.25, 0.15), (0.75, 0.15)),
    "b": ((0.75, 0.15), (0.75, 0.50)),
    "c": ((0.75, 0.50), (0.75, 0.85)),
    "d": ((0.25, 0.85), (0.75, 0.85)),
    "e": ((0.25, 0.50), (0.25, 0.85)),
    "f": ((0.25, 0.15), (0.25, 0.50)),
    "g": ((0.25, 0.50), (0.75, 0.50)),
}

_DIGIT_SEGMENTS = {
    0: "abcdef",
    1: "bc",
    2: "abged",
    3: "abgcd",
    4: "fgbc",
    5: "afgcd",
    6: "afgcde",
    7: "abc",
    8: "abcdefg",
    9: "abcdfg",
}

# (stroke width at supersampled scale, horizontal shear)
_FONTS = {0: (4, 0.0), 1: (11, 0.28)}


@dataclass(frozen=True)
class TwoLabelDataset:
    """Images with an overt digit label and a covert font label."""

    images: np.ndarray  # (N, 28, 28) uint8
    y_pub: np.ndarray  # digit in [0, 10)
    y_priv: np.ndarray  # font in {0, 1}
    seed: int

    def __len__(self):
        return len(self.images)

    def split(self, train_frac=0.8):
        """Deterministic stratified train/test index split."""
        rng = np.random.default_rng(self.seed + 1)
        train, test = [], []
        for digit in range(10):
            for font in range(2):
                cell = np.flatnonzero((self.y_pub == digit) & (self.y_priv == font))
                cell = rng.permutation(cell)
                k = int(round(train_frac * len(cell)))
                train.extend(cell[:k])
                test.extend(cell[k:])
        return np.sort(np.array(train)), np.sort(np.array(test))


def _render(digit, font, rng):
    width, shear = _FONTS[font]
    big = _SIZE * _SS
    img = Image.new("L", (big, big), 0)
    draw = ImageDraw.Draw(img)
    for seg in _DIGIT_SEGMENTS[digit]:
        (x0, y0), (x1, y1) = _SEGMENTS[seg]
        draw.line(
            [(x0 * big, y0 * big), (x1 * big, y1 * big)],
            fill=255, width=width,
        )

    angle = rng.uniform(-8.0, 8.0) * np.pi / 180.0
    scale = rng.uniform(0.9, 1.1)
    tx = rng.uniform(-2.0, 2.0) * _SS
    ty = rng.uniform(-2.0, 2.0) * _SS
    c, s = np.cos(angle) / scale, np.sin(angle) / scale
    # inverse affine about the image centre, with the font's shear folded in
    cx = cy = big / 2.0
    m = np.array([[c, -s + shear], [s, c]])
    offset = np.array([cx - tx, cy - ty]) - m @ np.array([cx, cy])
    img = img.transform(
        (big, big), Image.AFFINE,
        (m[0, 0], m[0, 1], offset[0], m[1, 0], m[1, 1], offset[1]),
        resample=Image.BILINEAR,
    )
    out = np.asarray(img.resize((_SIZE, _SIZE), Image.LANCZOS), dtype=np.float64)
    out += rng.normal(0.0, 8.0, out.shape)
    return np.clip(out, 0, 255).astype(np.uint8)


def generate_dataset(n_samples, seed) -> TwoLabelDataset:
    """Balanced corpus: every (digit, font) cell gets n_samples/20 +- 1."""
    rng = np.random.default_rng(seed)
    cells = [(d, f) for d in range(10) for f in range(2)]
    base, extra = divmod(n_samples, 20)
    images, y_pub, y_priv = [], [], []
    for idx, (digit, font) in enumerate(cells):
        count = base + (1 if idx < extra else 0)
        for _ in range(count):
            images.append(_render(digit, font, rng))
            y_pub.append(digit)
            y_priv.append(font)
    order = rng.permutation(len(images))
    return TwoLabelDataset(
        images=np.stack(images)[order],
        y_pub=np.array(y_pub, dtype=np.int64)[order],
        y_priv=np.array(y_priv, dtype=np.int64)[order],
        seed=seed,
    )


def quantized_inputs(images, input_bits=4):
    """Right-shift 8-bit pixels to the encrypted pipeline's input levels."""
    shift = 8 - input_bits
    return (images.astype(np.int64) >> shift).reshape(len(images), -1)
