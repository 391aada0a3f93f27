"""Optimizer and budget settings for classifier pretraining and GAN training."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ConfigError
from ..losses import AdaptiveWeightState


@dataclass(frozen=True)
class TrainConfig:
    gan_batch: int = 16
    ac_batch: int = 64
    gan_lr: float = 1e-3
    ac_lr: float = 1e-3
    gan_betas: tuple[float, float] = (0.9, 0.99)
    ac_betas: tuple[float, float] = (0.0, 0.99)
    images_per_phase: int = 800_000
    total_images: int = 10_000_000
    critic_steps_per_gen_step: int = 1
    divergence_patience: int = 5

    def __post_init__(self):
        positive = {
            "gan_batch": self.gan_batch,
            "ac_batch": self.ac_batch,
            "gan_lr": self.gan_lr,
            "ac_lr": self.ac_lr,
            "images_per_phase": self.images_per_phase,
            "total_images": self.total_images,
            "critic_steps_per_gen_step": self.critic_steps_per_gen_step,
            "divergence_patience": self.divergence_patience,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")

    def to_dict(self) -> dict:
        return {
            "gan_batch": self.gan_batch,
            "ac_batch": self.ac_batch,
            "gan_lr": self.gan_lr,
            "ac_lr": self.ac_lr,
            "gan_betas": list(self.gan_betas),
            "ac_betas": list(self.ac_betas),
            "images_per_phase": self.images_per_phase,
            "total_images": self.total_images,
            "critic_steps_per_gen_step": self.critic_steps_per_gen_step,
            "divergence_patience": self.divergence_patience,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        d["gan_betas"] = tuple(d.get("gan_betas", (0.9, 0.99)))
        d["ac_betas"] = tuple(d.get("ac_betas", (0.0, 0.99)))
        return cls(**d)


def desk_train_config(**overrides) -> TrainConfig:
    """Desk-scale budgets: 2k images per phase, 60k total."""
    base = dict(images_per_phase=2000, total_images=60_000)
    base.update(overrides)
    return TrainConfig(**base)


# Controller learning rate for desk-scale runs. The full-scale default
# (r = 0.01) ramps the conditioning weights over millions of images;
# compressed to a 60k-image budget the same gap-integral needs a faster
# rate or conditioning never gets enough weight to converge.
DESK_GAMMA_RATE = 0.02


def desk_adaptive_state(**overrides) -> AdaptiveWeightState:
    kwargs = dict(r=DESK_GAMMA_RATE)
    kwargs.update(overrides)
    return AdaptiveWeightState(**kwargs)
