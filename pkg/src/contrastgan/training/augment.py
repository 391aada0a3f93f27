"""Data augmentation for classifier pretraining.

Only the auxiliary classifier sees augmented data; the critic never
does (augmentation blurs the realness signal). The default op list is
label-safe for layouts whose orientation is geometric: small rotations
and translations plus intensity jitter, no flips or quarter-turns.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

DEFAULT_OPS = ("translate", "rotate", "intensity")
ALL_OPS = ("translate", "rotate", "intensity", "flip")

MAX_SHIFT_PX = 3
MAX_ROTATE_DEG = 10.0
INTENSITY_SCALE = 0.1
INTENSITY_OFFSET = 0.05


def _translate(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    dy, dx = rng.integers(-MAX_SHIFT_PX, MAX_SHIFT_PX + 1, size=2)
    out = np.full_like(img, img.min())
    h, w = img.shape
    ys = slice(max(0, dy), min(h, h + dy))
    xs = slice(max(0, dx), min(w, w + dx))
    ys_src = slice(max(0, -dy), min(h, h - dy))
    xs_src = slice(max(0, -dx), min(w, w - dx))
    out[ys, xs] = img[ys_src, xs_src]
    return out


def _rotate(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    angle = rng.uniform(-MAX_ROTATE_DEG, MAX_ROTATE_DEG)
    return ndimage.rotate(img, angle, reshape=False, order=1, mode="nearest")


def _intensity(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    scale = 1.0 + rng.uniform(-INTENSITY_SCALE, INTENSITY_SCALE)
    offset = rng.uniform(-INTENSITY_OFFSET, INTENSITY_OFFSET)
    return np.clip(img * scale + offset, -1.0, 1.0)


def _flip(img: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return np.fliplr(img) if rng.random() < 0.5 else img


_OPS = {"translate": _translate, "rotate": _rotate, "intensity": _intensity, "flip": _flip}


def augment_image(img: np.ndarray, rng: np.random.Generator, ops=DEFAULT_OPS) -> np.ndarray:
    for name in ops:
        if name not in _OPS:
            raise ValueError(f"unknown augmentation {name!r}, choose from {ALL_OPS}")
        img = _OPS[name](img, rng)
    return img


def augment_batch(batch: np.ndarray, rng: np.random.Generator, ops=DEFAULT_OPS) -> np.ndarray:
    """Augment a (n, h, w) or (n, 1, h, w) batch; returns a new array."""
    squeeze = batch.ndim == 4
    imgs = batch[:, 0] if squeeze else batch
    out = np.stack([augment_image(img, rng, ops) for img in imgs])
    return out[:, None] if squeeze else out
