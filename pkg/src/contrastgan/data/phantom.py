"""Physics-based phantom images whose contrast follows the spin-echo model.

Each tissue is an ellipse with proton density and relaxation times; its
signal at a given (TR, TE) is

    pd * (1 - exp(-TR/T1)) * exp(-TE/T2)

so region intensities respond to the acquisition parameters exactly the
way the conditioning should. The imaging orientation selects a distinct
rotation of the layout, giving the orientation label a geometric
signature. A short-T1/long-T2 marker vial is part of the default layout:
it keeps a near-constant bright reference in every image so per-slice
min-max normalization preserves absolute contrast changes instead of
cancelling them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..conditions import ConditionSpace, ConditionVector, validate_condition
from ..errors import ConfigError, DomainError, RangeViolationError
from .manifest import ImageRecord
from .preprocess import preprocess_image

MAX_ORIENTATIONS = 8  # 4 rotations x optional mirror


@dataclass(frozen=True)
class Tissue:
    """One elliptical tissue region with its relaxation parameters."""

    name: str
    pd: float
    t1_ms: float
    t2_ms: float
    center: tuple[float, float]  # (x, y) in unit canvas coordinates
    radii: tuple[float, float]  # (rx, ry) in unit canvas coordinates

    def __post_init__(self):
        if not 0 < self.pd <= 1:
            raise ConfigError(f"{self.name}: pd must be in (0, 1], got {self.pd}")
        if self.t1_ms <= 0 or self.t2_ms <= 0:
            raise ConfigError(f"{self.name}: relaxation times must be positive")
        for c, r in zip(self.center, self.radii):
            if r <= 0 or c - r < 0 or c + r > 1:
                raise ConfigError(f"{self.name}: shape leaves the unit canvas")


# Conventional 1.5T literature magnitudes; oracle inputs only. The marker
# vial (fast T1 recovery, very slow T2 decay) anchors the intensity scale.
DEFAULT_TISSUES = (
    Tissue("muscle", pd=0.8, t1_ms=870.0, t2_ms=47.0, center=(0.52, 0.55), radii=(0.30, 0.34)),
    Tissue("fluid", pd=1.0, t1_ms=2500.0, t2_ms=250.0, center=(0.40, 0.36), radii=(0.14, 0.11)),
    Tissue("fat", pd=0.9, t1_ms=260.0, t2_ms=84.0, center=(0.74, 0.72), radii=(0.13, 0.17)),
    Tissue("marker", pd=1.0, t1_ms=300.0, t2_ms=2000.0, center=(0.14, 0.12), radii=(0.06, 0.06)),
)


@dataclass(frozen=True)
class PhantomSpec:
    """Tissue layout, canvas size in pixels, and additive noise level."""

    tissues: tuple[Tissue, ...] = DEFAULT_TISSUES
    canvas: int = 64
    noise_sigma: float = 0.05

    def __post_init__(self):
        if len(self.tissues) < 2:
            raise ConfigError("phantom needs at least two tissues")
        if self.canvas < 8:
            raise ConfigError("canvas too small")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")

    def tissue(self, name: str) -> Tissue:
        for t in self.tissues:
            if t.name == name:
                return t
        raise KeyError(name)


def phantom_signal(pd, t1_ms, t2_ms, tr_ms, te_ms):
    """Spin-echo signal pd * (1 - exp(-TR/T1)) * exp(-TE/T2).

    Accepts scalars or broadcastable arrays; strictly increasing in TR
    and strictly decreasing in TE.
    """
    t1 = np.asarray(t1_ms, dtype=np.float64)
    t2 = np.asarray(t2_ms, dtype=np.float64)
    if np.any(t1 <= 0) or np.any(t2 <= 0):
        raise DomainError("relaxation times must be positive")
    out = pd * (1.0 - np.exp(-np.asarray(tr_ms) / t1)) * np.exp(-np.asarray(te_ms) / t2)
    return float(out) if np.isscalar(pd) and out.ndim == 0 else out


def _canonical_masks(spec: PhantomSpec) -> list[np.ndarray]:
    n = spec.canvas
    # pixel centers in unit coordinates
    coords = (np.arange(n) + 0.5) / n
    xg, yg = np.meshgrid(coords, coords)  # x varies along columns, y along rows
    masks = []
    for t in spec.tissues:
        cx, cy = t.center
        rx, ry = t.radii
        masks.append(((xg - cx) / rx) ** 2 + ((yg - cy) / ry) ** 2 <= 1.0)
    return masks


def layout_masks(spec: PhantomSpec, orientation_index: int) -> dict[str, np.ndarray]:
    """Visible (non-overlapped) boolean region masks for one orientation.

    Tissues are painted in list order, later tissues overwrite earlier
    ones; the returned masks are the visible remainders. Orientation k
    rotates the whole layout by k quarter-turns (mirrored for k >= 4).
    """
    if not 0 <= orientation_index < MAX_ORIENTATIONS:
        raise ConfigError(
            f"orientation index {orientation_index} outside supported 0..{MAX_ORIENTATIONS - 1}"
        )
    raw = _canonical_masks(spec)
    visible = []
    for i, mask in enumerate(raw):
        covered = np.zeros_like(mask)
        for later in raw[i + 1 :]:
            covered |= later
        visible.append(mask & ~covered)
    out = {}
    for t, mask in zip(spec.tissues, visible):
        m = np.rot90(mask, orientation_index % 4)
        if orientation_index >= 4:
            m = np.fliplr(m)
        out[t.name] = m.copy()
    return out


def phantom_signal_image(
    spec: PhantomSpec, c: ConditionVector, space: ConditionSpace
) -> np.ndarray:
    """Noise-free raw signal canvas (background 0) for condition ``c``."""
    if not validate_condition(c, space):
        raise RangeViolationError("condition", f"{c} invalid for {space}")
    masks = layout_masks(spec, space.orientation_index(c.orientation))
    img = np.zeros((spec.canvas, spec.canvas))
    for t in spec.tissues:
        img[masks[t.name]] = phantom_signal(t.pd, t.t1_ms, t.t2_ms, c.tr_ms, c.te_ms)
    return img


def generate_phantom(
    spec: PhantomSpec,
    c: ConditionVector,
    space: ConditionSpace,
    seed: int,
    *,
    study_id: str = "phantom",
    series_id: str = "series0",
    slice_index: int = 0,
    slice_count: int = 1,
) -> ImageRecord:
    """One phantom slice: signal + seeded Gaussian noise, preprocessed.

    Deterministic for a given (spec, condition, seed). The pixel array is
    normalized to [-1, 1] at the canvas resolution.
    """
    img = phantom_signal_image(spec, c, space)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
    return ImageRecord(
        study_id=study_id,
        series_id=series_id,
        slice_index=slice_index,
        slice_count=slice_count,
        tr_ms=c.tr_ms,
        te_ms=c.te_ms,
        orientation=c.orientation,
        field_strength_t=1.5,
        fat_saturated=True,
        series_description="phantom spin-echo fs",
        manufacturer="Siemens",
        pixels=preprocess_image(img, target=spec.canvas),
    )


def build_phantom_dataset(
    count: int,
    spec: PhantomSpec,
    space: ConditionSpace,
    seed: int,
    slices_per_study: int = 6,
) -> list[ImageRecord]:
    """Generate ``count`` phantom slices with uniformly drawn TR/TE.

    Orientations cycle through the space's vocabulary so classes stay
    balanced; slices are grouped into synthetic studies so study-level
    splitting has something to split on.
    """
    rng = np.random.default_rng(seed)
    records = []
    for i in range(count):
        c = ConditionVector(
            tr_ms=float(rng.uniform(*space.tr_range)),
            te_ms=float(rng.uniform(*space.te_range)),
            orientation=space.orientations[i % len(space.orientations)],
        )
        noise_seed = int(rng.integers(0, 2**31 - 1))
        rec = generate_phantom(
            spec,
            c,
            space,
            noise_seed,
            study_id=f"ph{i // slices_per_study:05d}",
            series_id="se0",
            slice_index=i % slices_per_study,
            slice_count=slices_per_study,
        )
        records.append(rec)
    return records


def with_noise(spec: PhantomSpec, noise_sigma: float) -> PhantomSpec:
    return replace(spec, noise_sigma=noise_sigma)
