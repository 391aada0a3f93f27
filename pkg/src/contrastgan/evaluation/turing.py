"""Forced-balance visual Turing test: sessions, label intake, analytics.

Readers see grids of six images (three real, three synthetic, shuffled
once at build time so every reader gets the same order) and must mark
exactly three of each per grid. Forcing the predicted label marginal to
match the true marginal removes the usual bias toward calling images
synthetic; unbalanced submissions are rejected without changing state.
"""

from __future__ import annotations

import json
import uuid
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InsufficientDataError

REAL = "real"
SYNTHETIC = "synthetic"
LABELS = (REAL, SYNTHETIC)


@dataclass
class TuringItem:
    item_id: str
    ref: str
    true_label: str
    tr_ms: float
    te_ms: float
    orientation: str

    def public_view(self) -> dict:
        """What a reader may see: no truth."""
        return {
            "item_id": self.item_id,
            "ref": self.ref,
            "tr_ms": self.tr_ms,
            "te_ms": self.te_ms,
            "orientation": self.orientation,
        }


@dataclass
class TuringSession:
    session_id: str
    grid_size: int
    items: dict[str, TuringItem]
    grids: list[list[str]]  # item ids per grid, display order
    labels: dict[str, dict[int, list[str]]] = field(default_factory=dict)
    seed: int = 0

    @property
    def n_grids(self) -> int:
        return len(self.grids)

    def reader_complete(self, reader: str) -> bool:
        done = self.labels.get(reader, {})
        return all(g in done for g in range(self.n_grids))

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "session_id": self.session_id,
            "grid_size": self.grid_size,
            "seed": self.seed,
            "items": {k: vars(v) for k, v in self.items.items()},
            "grids": self.grids,
            "labels": {r: {str(g): lab for g, lab in by.items()} for r, by in self.labels.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TuringSession":
        return cls(
            session_id=d["session_id"],
            grid_size=d["grid_size"],
            seed=d.get("seed", 0),
            items={k: TuringItem(**v) for k, v in d["items"].items()},
            grids=[list(g) for g in d["grids"]],
            labels={
                r: {int(g): list(lab) for g, lab in by.items()}
                for r, by in d.get("labels", {}).items()
            },
        )


def save_session(session: TuringSession, path) -> None:
    with open(path, "w") as fh:
        json.dump(session.to_dict(), fh, indent=2)


def load_session(path) -> TuringSession:
    with open(path) as fh:
        return TuringSession.from_dict(json.load(fh))


def build_turing_session(
    real_pool: list[dict],
    synth_pool: list[dict],
    n_per_class: int,
    seed: int,
    grid_size: int = 6,
) -> TuringSession:
    """Pack n real + n synthetic items into balanced grids.

    Pool entries are dicts with ref/tr_ms/te_ms/orientation; synthetic
    entries should have been generated at conditions matched to their
    real counterparts. If 2*n is not divisible by the grid size, n is
    padded down (with a warning) to the largest packable count.
    """
    if grid_size % 2:
        raise ConfigError("grid size must be even (half real, half synthetic)")
    if len(real_pool) < n_per_class or len(synth_pool) < n_per_class:
        raise InsufficientDataError(
            f"pools hold {len(real_pool)}/{len(synth_pool)} items, need {n_per_class} each"
        )
    half = grid_size // 2
    if (2 * n_per_class) % grid_size:
        packable = (2 * n_per_class) // grid_size * grid_size // 2
        warnings.warn(
            f"{n_per_class} per class does not fill grids of {grid_size}; using {packable}",
            stacklevel=2,
        )
        n_per_class = packable

    rng = np.random.default_rng(seed)
    real_sel = [real_pool[i] for i in rng.permutation(len(real_pool))[:n_per_class]]
    synth_sel = [synth_pool[i] for i in rng.permutation(len(synth_pool))[:n_per_class]]

    items: dict[str, TuringItem] = {}

    def register(entry: dict, true_label: str, idx: int) -> str:
        item_id = f"{'r' if true_label == REAL else 's'}{idx:04d}"
        items[item_id] = TuringItem(
            item_id=item_id,
            ref=str(entry["ref"]),
            true_label=true_label,
            tr_ms=float(entry["tr_ms"]),
            te_ms=float(entry["te_ms"]),
            orientation=str(entry["orientation"]),
        )
        return item_id

    real_ids = [register(e, REAL, i) for i, e in enumerate(real_sel)]
    synth_ids = [register(e, SYNTHETIC, i) for i, e in enumerate(synth_sel)]

    grids = []
    for g in range(n_per_class // half):
        grid = real_ids[g * half : (g + 1) * half] + synth_ids[g * half : (g + 1) * half]
        order = rng.permutation(grid_size)
        grids.append([grid[i] for i in order])

    return TuringSession(
        session_id=uuid.uuid4().hex[:12],
        grid_size=grid_size,
        items=items,
        grids=grids,
        seed=seed,
    )


def submit_grid_labels(
    session: TuringSession, reader: str, grid_index: int, labels: list[str]
) -> bool:
    """Accept a reader's grid labels iff they are exactly half/half.

    Returns True on acceptance; a rejected submission leaves the session
    unchanged. Resubmission overwrites the reader's previous labels.
    """
    if not 0 <= grid_index < session.n_grids:
        raise ConfigError(f"grid index {grid_index} outside 0..{session.n_grids - 1}")
    if len(labels) != session.grid_size or any(l not in LABELS for l in labels):
        return False
    half = session.grid_size // 2
    if labels.count(REAL) != half or labels.count(SYNTHETIC) != half:
        return False
    session.labels.setdefault(reader, {})[grid_index] = list(labels)
    return True


@dataclass
class ConfusionMatrix:
    """counts[predicted][true] over the label set (real, synthetic)."""

    counts: dict[str, dict[str, int]]

    @classmethod
    def from_counts(cls, pred_real_true_real, pred_real_true_synth,
                    pred_synth_true_real, pred_synth_true_synth) -> "ConfusionMatrix":
        return cls(
            counts={
                REAL: {REAL: pred_real_true_real, SYNTHETIC: pred_real_true_synth},
                SYNTHETIC: {REAL: pred_synth_true_real, SYNTHETIC: pred_synth_true_synth},
            }
        )

    @property
    def total(self) -> int:
        return sum(sum(row.values()) for row in self.counts.values())

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise InsufficientDataError("empty confusion matrix")
        return (self.counts[REAL][REAL] + self.counts[SYNTHETIC][SYNTHETIC]) / self.total

    def to_dict(self) -> dict:
        return {p: dict(t) for p, t in self.counts.items()}


def mean_error(accuracies, round_digits: int | None = None) -> float:
    """Mean mislabeling rate across readers.

    With ``round_digits`` each reader's accuracy is rounded first, which
    matches how per-reader percentages are usually quoted.
    """
    accs = list(accuracies)
    if not accs:
        raise InsufficientDataError("no accuracies")
    if round_digits is not None:
        accs = [round(a, round_digits) for a in accs]
    return 1.0 - sum(accs) / len(accs)


@dataclass
class TuringReport:
    per_reader: dict[str, dict]
    mean_error_raw: float
    mean_error_rounded: float
    agreement: dict[str, dict] | None
    n_items: int

    def to_dict(self) -> dict:
        return {
            "per_reader": {
                r: {"confusion": d["confusion"].to_dict(), "accuracy": d["accuracy"]}
                for r, d in self.per_reader.items()
            },
            "mean_error_raw": self.mean_error_raw,
            "mean_error_rounded": self.mean_error_rounded,
            "agreement": self.agreement,
            "n_items": self.n_items,
        }


def _reader_predictions(session: TuringSession, reader: str) -> dict[str, str]:
    preds: dict[str, str] = {}
    for g, item_ids in enumerate(session.grids):
        labels = session.labels[reader][g]
        for item_id, label in zip(item_ids, labels):
            preds[item_id] = label
    return preds


def turing_analytics(session: TuringSession, readers: list[str] | None = None) -> TuringReport:
    """Confusion matrices, accuracies, mean error, and agreement counts.

    Requires every queried reader to have completed all grids. Agreement
    counts items on which both readers of a pair made the same
    prediction, stratified by that prediction and the true label; with
    forced balance the chance agreement rate is 1/2, which also gives
    Cohen's kappa = 2*po - 1.
    """
    readers = readers if readers is not None else sorted(session.labels)
    if not readers:
        raise InsufficientDataError("no readers have submitted labels")
    for r in readers:
        if not session.reader_complete(r):
            raise InsufficientDataError(f"reader {r!r} has not completed all grids")

    preds = {r: _reader_predictions(session, r) for r in readers}
    per_reader = {}
    for r in readers:
        counts = {p: {t: 0 for t in LABELS} for p in LABELS}
        for item_id, p in preds[r].items():
            counts[p][session.items[item_id].true_label] += 1
        cm = ConfusionMatrix(counts=counts)
        per_reader[r] = {"confusion": cm, "accuracy": cm.accuracy}

    agreement = None
    if len(readers) >= 2:
        agreement = {}
        for i in range(len(readers)):
            for j in range(i + 1, len(readers)):
                r1, r2 = readers[i], readers[j]
                counts = {p: {t: 0 for t in LABELS} for p in LABELS}
                agreed = 0
                for item_id in session.items:
                    p1, p2 = preds[r1][item_id], preds[r2][item_id]
                    if p1 == p2:
                        agreed += 1
                        counts[p1][session.items[item_id].true_label] += 1
                po = agreed / len(session.items)
                agreement[f"{r1}|{r2}"] = {
                    "counts": counts,
                    "observed_agreement": po,
                    "cohens_kappa": 2.0 * po - 1.0,
                }

    accs = [d["accuracy"] for d in per_reader.values()]
    return TuringReport(
        per_reader=per_reader,
        mean_error_raw=mean_error(accs),
        mean_error_rounded=mean_error(accs, round_digits=2),
        agreement=agreement,
        n_items=len(session.items),
    )
