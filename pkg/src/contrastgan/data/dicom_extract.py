"""Optional DICOM-to-manifest extractor.

Walks a directory of DICOM files and writes the flat manifest the rest
of the pipeline consumes, pulling only the header attributes the filter
cascade needs. Requires ``pydicom``, which is an optional dependency;
everything else in the package works from manifests alone.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from .manifest import OPTIONAL_COLUMNS, REQUIRED_COLUMNS


def _require_pydicom():
    try:
        import pydicom
    except ImportError as exc:
        raise ImportError(
            "DICOM extraction needs the optional 'pydicom' package; "
            "install it or supply a manifest CSV directly"
        ) from exc
    return pydicom


def orientation_label(image_orientation_patient) -> str:
    """Dominant-plane label from the direction cosines (0020,0037)."""
    iop = np.asarray([float(v) for v in image_orientation_patient], dtype=float)
    if iop.shape != (6,):
        raise ValueError(f"expected 6 direction cosines, got {iop.shape}")
    normal = np.cross(iop[:3], iop[3:])
    axis = int(np.argmax(np.abs(normal)))
    return ("sagittal", "coronal", "axial")[axis]


def _fat_saturated(ds) -> bool:
    options = ds.get("ScanOptions") or ""
    if isinstance(options, (list, tuple)):
        options = " ".join(str(o) for o in options)
    description = str(ds.get("SeriesDescription") or "")
    return "FS" in str(options).upper() or "FS" in description.upper().split()


def extract_manifest(dicom_dir, out_csv, pixels_dir: str = "pixels") -> int:
    """Write a manifest (plus .npy pixel dumps) for all readable files.

    Returns the number of manifest rows written. Files that fail to
    parse are skipped; slice counts are derived per series from the
    files actually present.
    """
    pydicom = _require_pydicom()
    dicom_dir = Path(dicom_dir)
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    pix_root = out_csv.parent / pixels_dir
    pix_root.mkdir(parents=True, exist_ok=True)

    by_series: dict[tuple[str, str], list] = defaultdict(list)
    for path in sorted(dicom_dir.rglob("*")):
        if not path.is_file():
            continue
        try:
            ds = pydicom.dcmread(path)
            key = (str(ds.StudyInstanceUID), str(ds.SeriesInstanceUID))
            by_series[key].append((int(ds.get("InstanceNumber") or 0), ds))
        except Exception:
            continue

    rows = 0
    columns = list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS)
    with open(out_csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for (study_uid, series_uid), slices in by_series.items():
            slices.sort(key=lambda pair: pair[0])
            for index, (_, ds) in enumerate(slices):
                fname = f"{study_uid[-12:]}_{series_uid[-12:]}_{index:03d}.npy"
                np.save(pix_root / fname, ds.pixel_array.astype(np.float32))
                writer.writerow(
                    {
                        "study_id": study_uid,
                        "series_id": series_uid,
                        "slice_index": index,
                        "slice_count": len(slices),
                        "pixels_path": f"{pixels_dir}/{fname}",
                        "tr_ms": float(ds.RepetitionTime),
                        "te_ms": float(ds.EchoTime),
                        "orientation": orientation_label(ds.ImageOrientationPatient),
                        "field_strength_t": float(ds.MagneticFieldStrength),
                        "fat_saturated": str(_fat_saturated(ds)).lower(),
                        "series_description": str(ds.get("SeriesDescription") or ""),
                        "manufacturer": str(ds.get("Manufacturer") or ""),
                        "coil_manufacturer": str(ds.get("ReceiveCoilManufacturer") or ""),
                    }
                )
                rows += 1
    return rows
