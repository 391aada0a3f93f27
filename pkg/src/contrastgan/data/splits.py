"""Study-level dataset splitting.

Whole studies are assigned to a split so no subject leaks across
train/val/test. Studies are shuffled with the seed and greedily
assigned to validation until its image quota is met, then to test,
with the remainder going to training.
"""

from __future__ import annotations

import numpy as np

from ..errors import InsufficientDataError
from .manifest import ImageRecord


def split_by_study(
    records: list[ImageRecord], val_size: int, test_size: int, seed: int
) -> tuple[list[ImageRecord], list[ImageRecord], list[ImageRecord]]:
    """Partition records by study id into (train, val, test).

    val/test receive whole studies until they hold at least ``val_size``
    and ``test_size`` images respectively. Raises InsufficientDataError
    when the quotas cannot be met.
    """
    by_study: dict[str, int] = {}
    for rec in records:
        by_study[rec.study_id] = by_study.get(rec.study_id, 0) + 1

    study_ids = sorted(by_study)
    rng = np.random.default_rng(seed)
    order = [study_ids[i] for i in rng.permutation(len(study_ids))]

    assignment: dict[str, str] = {}
    counts = {"val": 0, "test": 0}
    for sid in order:
        if counts["val"] < val_size:
            assignment[sid] = "val"
            counts["val"] += by_study[sid]
        elif counts["test"] < test_size:
            assignment[sid] = "test"
            counts["test"] += by_study[sid]
        else:
            assignment[sid] = "train"
    if counts["val"] < val_size or counts["test"] < test_size:
        raise InsufficientDataError(
            f"cannot satisfy split quotas val={val_size}, test={test_size} "
            f"with {len(records)} images in {len(study_ids)} studies"
        )

    splits: dict[str, list[ImageRecord]] = {"train": [], "val": [], "test": []}
    for rec in records:
        splits[assignment[rec.study_id]].append(rec)
    return splits["train"], splits["val"], splits["test"]
