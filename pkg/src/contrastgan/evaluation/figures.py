"""Matplotlib renderings of evaluation artifacts (report path).

Everything here writes figures to files; numeric sidecars are produced
by the owning modules so tests assert numbers, not pixels.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .interpolation import GridResult
from .turing import LABELS, TuringReport


def save_grid_figure(result: GridResult, path, annotate: bool = True) -> None:
    """Tile montage with the classifier readback stamped in red."""
    n_tr, n_te = result.shape
    fig, axes = plt.subplots(
        n_tr, n_te, figsize=(2.0 * n_te, 2.0 * n_tr), squeeze=False
    )
    for i in range(n_tr):
        for j in range(n_te):
            ax = axes[i][j]
            ax.imshow(result.tiles[i, j], cmap="gray", vmin=-1, vmax=1)
            ax.set_xticks([])
            ax.set_yticks([])
            if i == 0:
                ax.set_title(f"TE {result.te_values[j]:.0f} ms", fontsize=8)
            if j == 0:
                ax.set_ylabel(f"TR {result.tr_values[i]:.0f} ms", fontsize=8)
            if annotate:
                got = result.readback[i * n_te + j]
                ax.text(
                    0.03,
                    0.97,
                    f"{got['tr_ms']:.0f}/{got['te_ms']:.1f}",
                    color="red",
                    fontsize=7,
                    va="top",
                    transform=ax.transAxes,
                )
    fig.suptitle(f"orientation: {result.orientation}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_telemetry_figure(records: list[dict], path) -> None:
    """Loss curves and adaptive-weight trajectories over training."""
    steps = [r["step"] for r in records]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(steps, [r["critic_loss"] for r in records], label="critic", lw=0.8)
    ax1.plot(steps, [r["gen_total"] for r in records], label="generator", lw=0.8)
    ax1.set_ylabel("loss")
    ax1.legend(fontsize=8)
    for key, color in zip(("iop", "te", "tr"), ("tab:blue", "tab:orange", "tab:green")):
        ax2.plot(steps, [r["gamma"][key] for r in records], label=f"gamma {key}", color=color)
    ax2.set_xlabel("generator step")
    ax2.set_ylabel("adaptive weight")
    ax2.legend(fontsize=8)
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_confusion_figure(report: TuringReport, path) -> None:
    readers = list(report.per_reader)
    fig, axes = plt.subplots(1, len(readers), figsize=(3.2 * len(readers), 3.2), squeeze=False)
    for ax, reader in zip(axes[0], readers):
        cm = report.per_reader[reader]["confusion"]
        mat = np.array([[cm.counts[p][t] for t in LABELS] for p in LABELS])
        ax.imshow(mat, cmap="Blues")
        for i in range(2):
            for j in range(2):
                ax.text(j, i, str(mat[i, j]), ha="center", va="center")
        ax.set_xticks([0, 1], LABELS)
        ax.set_yticks([0, 1], LABELS)
        ax.set_xlabel("true")
        ax.set_ylabel("predicted")
        ax.set_title(f"{reader} (acc {report.per_reader[reader]['accuracy']:.1%})", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_readback_scatter(intended, readback, label: str, path) -> None:
    """Intended vs readback scatter for one parameter (ms units)."""
    intended = np.asarray(intended, dtype=float)
    readback = np.asarray(readback, dtype=float)
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.scatter(intended, readback, s=8, alpha=0.5)
    lo = min(intended.min(), readback.min())
    hi = max(intended.max(), readback.max())
    ax.plot([lo, hi], [lo, hi], "k--", lw=0.8)
    ax.set_xlabel(f"intended {label} [ms]")
    ax.set_ylabel(f"readback {label} [ms]")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
