"""Auxiliary-classifier pretraining on labeled (augmented) images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..conditions import ConditionSpace, ConditionVector, encode_conditions
from ..errors import ConfigError
from ..evaluation.metrics import AcMetrics, eval_ac
from ..losses import GanLossConfig, ac_loss
from .augment import DEFAULT_OPS, augment_batch
from .config import TrainConfig


@dataclass
class PretrainResult:
    epochs: list[dict]
    final: AcMetrics


def pretrain_ac(
    ac,
    train_records,
    val_records,
    space: ConditionSpace,
    cfg: TrainConfig | None = None,
    loss_cfg: GanLossConfig | None = None,
    epochs: int = 200,
    seed: int = 0,
    augment_ops=DEFAULT_OPS,
    progress=None,
) -> PretrainResult:
    """Train the classifier on the multi-task conditioning loss.

    Augmentation applies to training batches only. Returns per-epoch
    validation metrics (orientation accuracy, TR/TE MAE in ms); with
    epochs=0 the classifier is returned untrained and evaluated once.
    """
    if not train_records or not val_records:
        raise ConfigError("pretraining needs non-empty train and validation sets")
    cfg = cfg or TrainConfig()
    loss_cfg = loss_cfg or GanLossConfig()

    images = np.stack([r.pixels for r in train_records]).astype(np.float32)
    conds = encode_conditions(
        [ConditionVector(r.tr_ms, r.te_ms, r.orientation) for r in train_records], space
    ).astype(np.float32)

    rng = np.random.default_rng(seed)
    torch.manual_seed(seed)
    opt = torch.optim.Adam(ac.parameters(), lr=cfg.ac_lr, betas=cfg.ac_betas)

    history: list[dict] = []
    n = images.shape[0]
    for epoch in range(epochs):
        ac.train()
        order = rng.permutation(n)
        epoch_loss, batches = 0.0, 0
        for start in range(0, n, cfg.ac_batch):
            idx = order[start : start + cfg.ac_batch]
            batch = images[idx]
            if augment_ops:
                batch = augment_batch(batch, rng, augment_ops).astype(np.float32)
            x = torch.from_numpy(batch).unsqueeze(1)
            c = torch.from_numpy(conds[idx])
            opt.zero_grad()
            total, _ = ac_loss(ac(x), c, loss_cfg)
            total.backward()
            opt.step()
            epoch_loss += float(total.detach())
            batches += 1
        metrics = eval_ac(ac, val_records, space, batch_size=cfg.ac_batch)
        entry = {"epoch": epoch, "train_loss": epoch_loss / max(batches, 1), **metrics.to_dict()}
        history.append(entry)
        if progress is not None:
            progress(entry)

    final = eval_ac(ac, val_records, space, batch_size=cfg.ac_batch)
    if not history:
        history.append({"epoch": -1, "train_loss": float("nan"), **final.to_dict()})
    ac.eval()
    return PretrainResult(epochs=history, final=final)
