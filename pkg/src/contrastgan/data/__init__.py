"""Data ingestion, filtering, preprocessing, splitting, and phantom synthesis."""

from .manifest import ImageRecord, parse_manifest, write_manifest
from .filters import FilterConfig, FilterReport, deduce_manufacturer, filter_records
from .splits import split_by_study
from .preprocess import bilinear_resize, box_downsample, normalize_intensity, preprocess_image
from .phantom import (
    DEFAULT_TISSUES,
    PhantomSpec,
    Tissue,
    build_phantom_dataset,
    generate_phantom,
    layout_masks,
    phantom_signal,
    phantom_signal_image,
)

__all__ = [
    "ImageRecord",
    "parse_manifest",
    "write_manifest",
    "FilterConfig",
    "FilterReport",
    "deduce_manufacturer",
    "filter_records",
    "split_by_study",
    "normalize_intensity",
    "bilinear_resize",
    "box_downsample",
    "preprocess_image",
    "Tissue",
    "PhantomSpec",
    "DEFAULT_TISSUES",
    "phantom_signal",
    "phantom_signal_image",
    "layout_masks",
    "generate_phantom",
    "build_phantom_dataset",
]
