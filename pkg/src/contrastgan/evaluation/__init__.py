"""Evaluation: conditioning metrics, interpolation grids, visual Turing test."""

from .interpolation import GridResult, montage_array, render_interpolation_grid
from .metrics import (
    REFERENCE_FULL_SCALE,
    AcMetrics,
    eval_ac,
    eval_ac_on_synthetic,
    predict_conditions,
)
from .turing import (
    LABELS,
    REAL,
    SYNTHETIC,
    ConfusionMatrix,
    TuringItem,
    TuringReport,
    TuringSession,
    build_turing_session,
    load_session,
    mean_error,
    save_session,
    submit_grid_labels,
    turing_analytics,
)

__all__ = [
    "AcMetrics",
    "eval_ac",
    "eval_ac_on_synthetic",
    "predict_conditions",
    "REFERENCE_FULL_SCALE",
    "GridResult",
    "render_interpolation_grid",
    "montage_array",
    "TuringItem",
    "TuringSession",
    "TuringReport",
    "ConfusionMatrix",
    "build_turing_session",
    "submit_grid_labels",
    "turing_analytics",
    "mean_error",
    "save_session",
    "load_session",
    "REAL",
    "SYNTHETIC",
    "LABELS",
]
