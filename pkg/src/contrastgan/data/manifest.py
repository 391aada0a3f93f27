"""Flat CSV manifests as the interchange format for image metadata.

A manifest row carries the acquisition-metadata subset the filter
cascade needs, plus a ``pixels_path`` pointing at the slice pixels
(``.npy`` or a lossless grayscale image). Paths are resolved relative
to the manifest file. Parsing never infers missing values; empty
optional fields stay absent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import ManifestParseError, SchemaError

REQUIRED_COLUMNS = (
    "study_id",
    "series_id",
    "slice_index",
    "slice_count",
    "pixels_path",
    "tr_ms",
    "te_ms",
    "orientation",
    "field_strength_t",
    "fat_saturated",
    "series_description",
)
OPTIONAL_COLUMNS = ("manufacturer", "coil_manufacturer")

_TRUTHY = {"true", "1", "yes", "y"}
_FALSY = {"false", "0", "no", "n"}


@dataclass
class ImageRecord:
    """One 2D slice with the acquisition metadata used by the filters."""

    study_id: str
    series_id: str
    slice_index: int
    slice_count: int
    tr_ms: float
    te_ms: float
    orientation: str
    field_strength_t: float
    fat_saturated: bool
    series_description: str
    manufacturer: str | None = None
    coil_manufacturer: str | None = None
    pixels: np.ndarray | None = None
    pixels_path: str | None = None

    @property
    def record_id(self) -> str:
        return f"{self.study_id}/{self.series_id}/{self.slice_index}"

    def with_pixels(self, pixels: np.ndarray) -> "ImageRecord":
        return replace(self, pixels=pixels)


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in _TRUTHY:
        return True
    if low in _FALSY:
        return False
    raise ValueError(f"cannot interpret {raw!r} as boolean")


def load_pixels_file(path: Path) -> np.ndarray:
    """Load a 2D pixel array from .npy or a lossless grayscale image file."""
    if path.suffix == ".npy":
        arr = np.load(path)
    else:
        from PIL import Image

        with Image.open(path) as im:
            arr = np.asarray(im, dtype=np.float64)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{path}: expected a non-empty 2D array, got shape {arr.shape}")
    return arr


def parse_manifest(path, load_pixels: bool = True) -> list[ImageRecord]:
    """Read a manifest CSV into ImageRecords.

    Raises SchemaError if a required column is missing from the header
    and ManifestParseError (with the 1-based data row number) for rows
    that cannot be parsed.
    """
    path = Path(path)
    records: list[ImageRecord] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"manifest missing required column(s): {', '.join(missing)}")
        for rownum, row in enumerate(reader, start=1):
            try:
                record = _parse_row(row)
            except (ValueError, KeyError) as exc:
                raise ManifestParseError(rownum, str(exc)) from exc
            if load_pixels:
                pix_path = path.parent / record.pixels_path
                try:
                    record = record.with_pixels(load_pixels_file(pix_path))
                except (OSError, ValueError) as exc:
                    raise ManifestParseError(rownum, f"pixels: {exc}") from exc
            records.append(record)
    return records


def _parse_row(row: dict) -> ImageRecord:
    def optional(col: str) -> str | None:
        raw = (row.get(col) or "").strip()
        return raw or None

    for col in REQUIRED_COLUMNS:
        if (row.get(col) or "").strip() == "":
            raise ValueError(f"required field {col!r} is empty")
    return ImageRecord(
        study_id=row["study_id"].strip(),
        series_id=row["series_id"].strip(),
        slice_index=int(row["slice_index"]),
        slice_count=int(row["slice_count"]),
        tr_ms=float(row["tr_ms"]),
        te_ms=float(row["te_ms"]),
        orientation=row["orientation"].strip(),
        field_strength_t=float(row["field_strength_t"]),
        fat_saturated=_parse_bool(row["fat_saturated"]),
        series_description=row["series_description"].strip(),
        manufacturer=optional("manufacturer"),
        coil_manufacturer=optional("coil_manufacturer"),
        pixels_path=row["pixels_path"].strip(),
    )


def write_manifest(records, path, pixels_dir: str = "pixels") -> Path:
    """Write records (and their pixel arrays) next to a manifest CSV.

    Pixel arrays are saved as .npy under ``pixels_dir`` relative to the
    manifest; records whose ``pixels`` is None must carry a pixels_path
    already resolvable from the manifest location.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pix_root = path.parent / pixels_dir
    columns = list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for rec in records:
            pixels_path = rec.pixels_path
            if rec.pixels is not None:
                pix_root.mkdir(parents=True, exist_ok=True)
                fname = f"{rec.study_id}_{rec.series_id}_{rec.slice_index:03d}.npy"
                np.save(pix_root / fname, rec.pixels.astype(np.float32))
                pixels_path = f"{pixels_dir}/{fname}"
            writer.writerow(
                {
                    "study_id": rec.study_id,
                    "series_id": rec.series_id,
                    "slice_index": rec.slice_index,
                    "slice_count": rec.slice_count,
                    "pixels_path": pixels_path,
                    "tr_ms": repr(rec.tr_ms),
                    "te_ms": repr(rec.te_ms),
                    "orientation": rec.orientation,
                    "field_strength_t": repr(rec.field_strength_t),
                    "fat_saturated": str(rec.fat_saturated).lower(),
                    "series_description": rec.series_description,
                    "manufacturer": rec.manufacturer or "",
                    "coil_manufacturer": rec.coil_manufacturer or "",
                }
            )
    return path
