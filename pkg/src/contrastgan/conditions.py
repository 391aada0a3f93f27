"""Acquisition-condition space: TR/TE ranges, orientation labels, unit scaling.

A condition is the triple (TR in ms, TE in ms, orientation label). The
generator and the auxiliary classifier never see raw milliseconds; TR and
TE are min-max scaled to [0, 1] over the configured ranges and the
orientation becomes a one-hot vector. Values outside the configured
ranges are rejected rather than clamped: the generator is only valid
inside the ranges it was trained on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EncodingError, RangeViolationError

DEFAULT_TR_RANGE = (1800.0, 5000.0)
DEFAULT_TE_RANGE = (12.0, 50.0)
DEFAULT_ORIENTATIONS = ("coronal", "sagittal", "axial")


@dataclass(frozen=True)
class ConditionVector:
    """One point in acquisition-parameter space."""

    tr_ms: float
    te_ms: float
    orientation: str


@dataclass(frozen=True)
class ConditionSpace:
    """Valid TR/TE ranges (ms) and the ordered orientation vocabulary."""

    tr_range: tuple[float, float] = DEFAULT_TR_RANGE
    te_range: tuple[float, float] = DEFAULT_TE_RANGE
    orientations: tuple[str, ...] = DEFAULT_ORIENTATIONS

    def __post_init__(self):
        for name, (lo, hi) in (("tr_range", self.tr_range), ("te_range", self.te_range)):
            if not lo < hi:
                raise ConfigError(f"{name} must satisfy min < max, got ({lo}, {hi})")
        if not self.orientations:
            raise ConfigError("orientation set must be non-empty")
        if len(set(self.orientations)) != len(self.orientations):
            raise ConfigError("orientation labels must be unique")

    @property
    def encoded_dim(self) -> int:
        """Length of the encoded condition vector: tr + te + one-hot."""
        return 2 + len(self.orientations)

    def orientation_index(self, label: str) -> int:
        try:
            return self.orientations.index(label)
        except ValueError:
            raise RangeViolationError(
                "orientation",
                f"unknown orientation {label!r}, expected one of {list(self.orientations)}",
            ) from None

    def to_dict(self) -> dict:
        return {
            "tr_range": list(self.tr_range),
            "te_range": list(self.te_range),
            "orientations": list(self.orientations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionSpace":
        return cls(
            tr_range=tuple(d["tr_range"]),
            te_range=tuple(d["te_range"]),
            orientations=tuple(d["orientations"]),
        )


@dataclass(frozen=True, eq=False)
class EncodedCondition:
    """Unit-scaled condition: tr/te in [0, 1] plus an orientation one-hot."""

    tr_unit: float
    te_unit: float
    orientation_onehot: np.ndarray = field(repr=False)

    def as_vector(self) -> np.ndarray:
        """Concatenation [tr_unit, te_unit, *onehot] fed to the networks."""
        return np.concatenate(
            [[self.tr_unit, self.te_unit], self.orientation_onehot]
        ).astype(np.float64)


def validate_condition(c: ConditionVector, s: ConditionSpace) -> bool:
    """Pure predicate: does ``c`` lie inside the space ``s``?"""
    return (
        s.tr_range[0] <= c.tr_ms <= s.tr_range[1]
        and s.te_range[0] <= c.te_ms <= s.te_range[1]
        and c.orientation in s.orientations
    )


def _check_range(value: float, lo: float, hi: float, fieldname: str) -> None:
    if not lo <= value <= hi:
        raise RangeViolationError(
            fieldname, f"{fieldname}={value} outside configured range [{lo}, {hi}]"
        )


def normalize_condition(c: ConditionVector, s: ConditionSpace) -> EncodedCondition:
    """Min-max scale TR/TE to [0, 1] and one-hot encode the orientation.

    Raises RangeViolationError naming the offending field for values
    outside the space.
    """
    _check_range(c.tr_ms, *s.tr_range, "tr_ms")
    _check_range(c.te_ms, *s.te_range, "te_ms")
    idx = s.orientation_index(c.orientation)
    onehot = np.zeros(len(s.orientations))
    onehot[idx] = 1.0
    return EncodedCondition(
        tr_unit=(c.tr_ms - s.tr_range[0]) / (s.tr_range[1] - s.tr_range[0]),
        te_unit=(c.te_ms - s.te_range[0]) / (s.te_range[1] - s.te_range[0]),
        orientation_onehot=onehot,
    )


def denormalize_condition(e: EncodedCondition, s: ConditionSpace) -> ConditionVector:
    """Exact affine inverse of :func:`normalize_condition`."""
    onehot = np.asarray(e.orientation_onehot)
    if onehot.shape != (len(s.orientations),):
        raise EncodingError(
            f"one-hot length {onehot.shape} does not match {len(s.orientations)} orientations"
        )
    if not np.isclose(onehot.sum(), 1.0):
        raise EncodingError(f"one-hot must sum to 1, got {onehot.sum()}")
    idx = int(np.argmax(onehot))
    return ConditionVector(
        tr_ms=s.tr_range[0] + e.tr_unit * (s.tr_range[1] - s.tr_range[0]),
        te_ms=s.te_range[0] + e.te_unit * (s.te_range[1] - s.te_range[0]),
        orientation=s.orientations[idx],
    )


def denormalize_units(tr_unit, te_unit, s: ConditionSpace):
    """Map unit-scaled TR/TE (scalars or arrays) back to milliseconds.

    Used for reporting regression outputs in ms; does not clamp, since
    classifier outputs are unbounded.
    """
    tr_ms = s.tr_range[0] + np.asarray(tr_unit, dtype=np.float64) * (
        s.tr_range[1] - s.tr_range[0]
    )
    te_ms = s.te_range[0] + np.asarray(te_unit, dtype=np.float64) * (
        s.te_range[1] - s.te_range[0]
    )
    return tr_ms, te_ms


def encode_conditions(conditions, s: ConditionSpace) -> np.ndarray:
    """Encode a sequence of ConditionVector into an (n, encoded_dim) array."""
    return np.stack([normalize_condition(c, s).as_vector() for c in conditions])
