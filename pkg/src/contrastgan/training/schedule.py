"""Progressive-growing schedule and exact image accounting.

The schedule is one stabilize phase at the base resolution followed by
a (fade, stabilize) pair per doubling, each phase with the same image
budget. Fade phases ramp alpha linearly from 0 to 1 over their budget.
``phase_batches`` turns a schedule into the exact sequence of training
batches: per-phase consumption equals the budget (tail batches shrink
instead of dropping the remainder), and an independent total-image
budget appends a conditioning continuation at the final resolution or
truncates the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..errors import ConfigError

STABILIZE = "stabilize"
FADE = "fade"


@dataclass(frozen=True)
class ProgressivePhase:
    resolution: int
    mode: str
    image_budget: int


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def make_schedule(base_res: int, final_res: int, images_per_phase: int) -> list[ProgressivePhase]:
    """[stabilize@base] then [fade@2r, stabilize@2r] per doubling."""
    if not _is_power_of_two(base_res) or not _is_power_of_two(final_res):
        raise ConfigError("resolutions must be powers of two")
    if final_res < base_res:
        raise ConfigError(f"final resolution {final_res} below base {base_res}")
    if images_per_phase <= 0:
        raise ConfigError("images_per_phase must be positive")
    phases = [ProgressivePhase(base_res, STABILIZE, images_per_phase)]
    res = base_res
    while res < final_res:
        res *= 2
        phases.append(ProgressivePhase(res, FADE, images_per_phase))
        phases.append(ProgressivePhase(res, STABILIZE, images_per_phase))
    return phases


def fade_alpha(consumed: int, budget: int) -> float:
    """Linear 0 -> 1 ramp position after ``consumed`` of ``budget`` images."""
    if budget <= 0:
        raise ConfigError("budget must be positive")
    return min(1.0, consumed / budget)


@dataclass(frozen=True)
class PhaseStep:
    """One training step's accounting slice."""

    phase_index: int
    resolution: int
    mode: str
    alpha: float
    batch_size: int
    images_before: int  # global images consumed before this step
    phase_consumed_before: int


def phase_batches(
    schedule: list[ProgressivePhase],
    total_images: int,
    batch_size: int,
    start_images: int = 0,
) -> Iterator[PhaseStep]:
    """Yield the exact batch sequence for a run of ``total_images``.

    If the schedule's combined budget is smaller than ``total_images``
    the run continues with a stabilize phase at the last resolution; if
    larger, the run stops mid-schedule. ``start_images`` fast-forwards
    the accounting (for resume) without yielding the consumed steps.
    """
    if batch_size <= 0:
        raise ConfigError("batch_size must be positive")
    if total_images <= 0:
        raise ConfigError("total_images must be positive")
    scheduled = sum(p.image_budget for p in schedule)
    phases = list(schedule)
    if total_images > scheduled:
        phases.append(
            ProgressivePhase(schedule[-1].resolution, STABILIZE, total_images - scheduled)
        )
    images = 0
    for idx, phase in enumerate(phases):
        consumed = 0
        while consumed < phase.image_budget and images < total_images:
            b = min(batch_size, phase.image_budget - consumed, total_images - images)
            alpha = fade_alpha(consumed, phase.image_budget) if phase.mode == FADE else 1.0
            if images >= start_images:
                yield PhaseStep(
                    phase_index=idx,
                    resolution=phase.resolution,
                    mode=phase.mode,
                    alpha=alpha,
                    batch_size=b,
                    images_before=images,
                    phase_consumed_before=consumed,
                )
            consumed += b
            images += b
        if images >= total_images:
            return
