"""Metadata filter cascade producing a homogeneous training corpus.

Rules are applied in a fixed order; the report records the first rule
each rejected record failed. Defaults keep 1.5 T Siemens fat-saturated
series with TR in [1800, 5000] ms, TE <= 50 ms, and only the six
central slices of each volume.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .manifest import ImageRecord


@dataclass(frozen=True)
class FilterConfig:
    field_strength_t: float = 1.5
    field_tolerance_t: float = 0.05
    vendor: str = "Siemens"
    tr_range: tuple[float, float] = (1800.0, 5000.0)
    te_max: float = 50.0
    require_fat_sat: bool = True
    central_slices: int = 6


@dataclass
class FilterReport:
    input_count: int
    kept_count: int
    rejected: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "input_count": self.input_count,
            "kept_count": self.kept_count,
            "rejected": [{"record_id": rid, "rule": rule} for rid, rule in self.rejected],
        }


def deduce_manufacturer(r: ImageRecord) -> ImageRecord:
    """Fill a missing manufacturer from the receiver-coil manufacturer."""
    if r.manufacturer is None and r.coil_manufacturer is not None:
        return replace(r, manufacturer=r.coil_manufacturer)
    return r


def central_slice_window(slice_count: int, n_central: int) -> tuple[int, int]:
    """Inclusive [start, stop) index window of the n central slices.

    Even remainders are biased toward the lower index. Volumes with
    fewer than n slices keep all their slices.
    """
    start = (slice_count - n_central) // 2
    return start, start + n_central


def _first_failing_rule(r: ImageRecord, cfg: FilterConfig) -> str | None:
    if abs(r.field_strength_t - cfg.field_strength_t) > cfg.field_tolerance_t:
        return "field_strength"
    if r.manufacturer is None or cfg.vendor.lower() not in r.manufacturer.lower():
        return "vendor"
    if not cfg.tr_range[0] <= r.tr_ms <= cfg.tr_range[1]:
        return "tr_range"
    if r.te_ms > cfg.te_max:
        return "te_max"
    if cfg.require_fat_sat and not r.fat_saturated:
        return "fat_saturation"
    start, stop = central_slice_window(r.slice_count, cfg.central_slices)
    if not start <= r.slice_index < stop:
        return "central_slice"
    return None


def filter_records(
    records: list[ImageRecord], cfg: FilterConfig | None = None
) -> tuple[list[ImageRecord], FilterReport]:
    """Apply the rule cascade; returns kept records and a rejection report."""
    cfg = cfg or FilterConfig()
    kept: list[ImageRecord] = []
    rejected: list[tuple[str, str]] = []
    for rec in records:
        rec = deduce_manufacturer(rec)
        rule = _first_failing_rule(rec, cfg)
        if rule is None:
            kept.append(rec)
        else:
            rejected.append((rec.record_id, rule))
    return kept, FilterReport(
        input_count=len(records), kept_count=len(kept), rejected=rejected
    )
