"""Slice preprocessing: intensity normalization and bilinear resampling.

Normalization is per slice and exact: the output spans [-1, 1] before
resampling. Resampling maps corners to corners (aligned-corner
bilinear), so corner values survive a resize and outputs remain convex
combinations of inputs.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateInputError, ShapeError


def normalize_intensity(pixels: np.ndarray) -> np.ndarray:
    """Affinely map pixel values so min -> -1 and max -> +1 exactly."""
    pixels = np.asarray(pixels, dtype=np.float64)
    lo, hi = pixels.min(), pixels.max()
    if hi <= lo:
        raise DegenerateInputError(
            f"constant image (min == max == {lo}) has no dynamic range"
        )
    return 2.0 * (pixels - lo) / (hi - lo) - 1.0


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int | None = None) -> np.ndarray:
    """Aligned-corner bilinear resampling of a 2D array."""
    out_w = out_h if out_w is None else out_w
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ShapeError(f"expected 2D image, got shape {img.shape}")
    in_h, in_w = img.shape
    if (in_h, in_w) == (out_h, out_w):
        return img.copy()

    def axis_coords(n_in: int, n_out: int) -> np.ndarray:
        if n_out == 1:
            return np.zeros(1)
        return np.arange(n_out) * (n_in - 1) / (n_out - 1)

    ys = axis_coords(in_h, out_h)
    xs = axis_coords(in_w, out_w)
    y0 = np.clip(np.floor(ys).astype(int), 0, in_h - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]

    top = img[np.ix_(y0, x0)] * (1 - wx) + img[np.ix_(y0, x1)] * wx
    bot = img[np.ix_(y1, x0)] * (1 - wx) + img[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bot * wy


def preprocess_image(pixels: np.ndarray, target: int = 256) -> np.ndarray:
    """Normalize intensities to [-1, 1], then resample to target x target."""
    return bilinear_resize(normalize_intensity(pixels), target)


def box_downsample(img: np.ndarray, factor: int = 2) -> np.ndarray:
    """Average non-overlapping factor x factor blocks (2x pyramid step).

    Accepts a single image (..., H, W); leading batch/channel axes pass
    through untouched.
    """
    h, w = img.shape[-2], img.shape[-1]
    if h % factor or w % factor:
        raise ShapeError(f"image side ({h}, {w}) not divisible by factor {factor}")
    shape = img.shape[:-2] + (h // factor, factor, w // factor, factor)
    return img.reshape(shape).mean(axis=(-3, -1))


def downsample_to(img: np.ndarray, side: int) -> np.ndarray:
    """Repeated 2x box downsampling until the image side equals ``side``."""
    cur = img.shape[-1]
    if img.shape[-2] != cur:
        raise ShapeError("downsample_to expects square images")
    if cur < side or cur % side:
        raise ShapeError(f"cannot reduce side {cur} to {side} by halving")
    while cur > side:
        img = box_downsample(img, 2)
        cur //= 2
    return img
