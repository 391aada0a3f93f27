"""Versioned checkpoint container for all three networks and run state.

Layout (torch.save dict):
  version        int, must match CHECKPOINT_VERSION
  net_config     NetConfig as plain dict
  condition_space ConditionSpace as plain dict
  train_config   TrainConfig dict or None
  generator/critic/ac  state dicts
  resolution     grown resolution of generator/critic
  adaptive_state gamma controller dict
  counters       {images_seen, step, phase_index, phase_consumed}
  optimizers     {generator, critic} Adam state dicts or None
  rng            {torch: ByteTensor, numpy: bit-generator state}
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch

from ..conditions import ConditionSpace
from ..errors import CheckpointVersionError
from ..losses import AdaptiveWeightState
from ..models import NetConfig, build_ac, build_discriminator, build_generator, grow_to
from .config import TrainConfig

CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    net_config: NetConfig
    space: ConditionSpace
    generator: object
    critic: object
    ac: object
    adaptive_state: AdaptiveWeightState
    counters: dict
    train_config: TrainConfig | None = None
    optimizer_states: dict | None = None
    rng_state: dict | None = None


def save_checkpoint(
    path,
    *,
    generator,
    critic,
    ac,
    net_config: NetConfig,
    space: ConditionSpace,
    adaptive_state: AdaptiveWeightState,
    counters: dict,
    train_config: TrainConfig | None = None,
    optimizers: dict | None = None,
    rng_state: dict | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": CHECKPOINT_VERSION,
        "net_config": net_config.to_dict(),
        "condition_space": space.to_dict(),
        "train_config": train_config.to_dict() if train_config else None,
        "generator": generator.state_dict(),
        "critic": critic.state_dict(),
        "ac": ac.state_dict(),
        "resolution": generator.resolution,
        "adaptive_state": adaptive_state.to_dict(),
        "counters": dict(counters),
        "optimizers": {k: v.state_dict() for k, v in optimizers.items()} if optimizers else None,
        "rng": rng_state,
    }
    torch.save(payload, path)
    return path


def save_ac_checkpoint(path, ac, net_config: NetConfig, space: ConditionSpace, metrics: dict | None = None) -> Path:
    """Classifier-only checkpoint (pretraining output)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "version": CHECKPOINT_VERSION,
            "kind": "ac",
            "net_config": net_config.to_dict(),
            "condition_space": space.to_dict(),
            "ac": ac.state_dict(),
            "metrics": metrics,
        },
        path,
    )
    return path


def load_ac_checkpoint(path):
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    if payload.get("version") != CHECKPOINT_VERSION or payload.get("kind") != "ac":
        raise CheckpointVersionError(f"{path} is not a compatible classifier checkpoint")
    cfg = NetConfig.from_dict(payload["net_config"])
    space = ConditionSpace.from_dict(payload["condition_space"])
    ac = build_ac(cfg)
    ac.load_state_dict(payload["ac"])
    ac.eval()
    return ac, cfg, space


def load_checkpoint(path) -> Checkpoint:
    path = Path(path)
    payload = torch.load(path, map_location="cpu", weights_only=False)
    version = payload.get("version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"checkpoint {path} has version {version}, expected {CHECKPOINT_VERSION}"
        )
    cfg = NetConfig.from_dict(payload["net_config"])
    space = ConditionSpace.from_dict(payload["condition_space"])
    generator = grow_to(build_generator(cfg), payload["resolution"])
    critic = grow_to(build_discriminator(cfg), payload["resolution"])
    ac = build_ac(cfg)
    generator.load_state_dict(payload["generator"])
    critic.load_state_dict(payload["critic"])
    ac.load_state_dict(payload["ac"])
    generator.eval()
    critic.eval()
    ac.eval()
    train_config = (
        TrainConfig.from_dict(payload["train_config"]) if payload.get("train_config") else None
    )
    return Checkpoint(
        net_config=cfg,
        space=space,
        generator=generator,
        critic=critic,
        ac=ac,
        adaptive_state=AdaptiveWeightState.from_dict(payload["adaptive_state"]),
        counters=payload["counters"],
        train_config=train_config,
        optimizer_states=payload.get("optimizers"),
        rng_state=payload.get("rng"),
    )
