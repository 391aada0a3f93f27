"""Acquisition-parameter interpolation grids for a fixed latent vector.

One latent is rendered across a TR x TE lattice at a fixed orientation;
every tile carries the classifier's readback of the parameters. The
numeric sidecar (intended vs readback per tile) is the machine-checkable
artifact; image renderings are built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..conditions import ConditionSpace, ConditionVector, denormalize_units, normalize_condition
from ..errors import ShapeError
from ..synthesis import generate_batch
from .metrics import predict_conditions


@dataclass
class GridResult:
    tiles: np.ndarray  # (n_tr, n_te, H, W) in [-1, 1]
    tr_values: list[float]
    te_values: list[float]
    orientation: str
    intended: list[dict]  # row-major tile annotations
    readback: list[dict]

    @property
    def shape(self) -> tuple[int, int]:
        return self.tiles.shape[0], self.tiles.shape[1]

    def sidecar_rows(self) -> list[dict]:
        rows = []
        n_te = len(self.te_values)
        for i, (want, got) in enumerate(zip(self.intended, self.readback)):
            rows.append(
                {
                    "row": i // n_te,
                    "col": i % n_te,
                    "intended_tr_ms": want["tr_ms"],
                    "intended_te_ms": want["te_ms"],
                    "intended_orientation": want["orientation"],
                    "readback_tr_ms": got["tr_ms"],
                    "readback_te_ms": got["te_ms"],
                    "readback_orientation": got["orientation"],
                }
            )
        return rows


def render_interpolation_grid(
    generator,
    ac,
    z: np.ndarray,
    tr_values,
    te_values,
    orientation: str,
    space: ConditionSpace,
) -> GridResult:
    """Generate the lattice from a single latent and annotate with readback.

    Raises RangeViolationError for values outside the condition space.
    """
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.shape[0] != generator.cfg.latent_dim:
        raise ShapeError(f"latent length {z.shape[0]} != {generator.cfg.latent_dim}")
    tr_values = [float(v) for v in tr_values]
    te_values = [float(v) for v in te_values]
    conditions = [
        ConditionVector(tr, te, orientation) for tr in tr_values for te in te_values
    ]
    for c in conditions:
        normalize_condition(c, space)  # validates, raises naming the field

    latents = np.tile(z, (len(conditions), 1))
    images = generate_batch(generator, latents, conditions, space)
    idx, tr_unit, te_unit = predict_conditions(ac, images.astype(np.float32))
    tr_ms, te_ms = denormalize_units(tr_unit, te_unit, space)

    intended = [
        {"tr_ms": c.tr_ms, "te_ms": c.te_ms, "orientation": c.orientation} for c in conditions
    ]
    readback = [
        {
            "tr_ms": float(tr_ms[i]),
            "te_ms": float(te_ms[i]),
            "orientation": space.orientations[int(idx[i])],
        }
        for i in range(len(conditions))
    ]
    h, w = images.shape[-2:]
    tiles = images.reshape(len(tr_values), len(te_values), h, w)
    return GridResult(
        tiles=tiles,
        tr_values=tr_values,
        te_values=te_values,
        orientation=orientation,
        intended=intended,
        readback=readback,
    )


def montage_array(result: GridResult, pad: int = 2) -> np.ndarray:
    """Stitch tiles into one 2D array (background at -1)."""
    n_tr, n_te, h, w = result.tiles.shape
    out = np.full((n_tr * (h + pad) - pad, n_te * (w + pad) - pad), -1.0)
    for i in range(n_tr):
        for j in range(n_te):
            out[i * (h + pad) : i * (h + pad) + h, j * (w + pad) : j * (w + pad) + w] = (
                result.tiles[i, j]
            )
    return out
