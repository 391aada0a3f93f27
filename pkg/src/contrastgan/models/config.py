"""Network topology configuration and fade-in state."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError, ShapeError

# Channel widths per output resolution for the full-scale profile,
# tapering like the usual progressive-growing setups.
FULL_CHANNELS = {4: 512, 8: 512, 16: 256, 32: 128, 64: 64, 128: 32, 256: 16}

# Desk-scale profile sized to finish the whole pipeline in minutes on a
# single CPU core while still learning layout + contrast conditioning.
DESK_CHANNELS = {4: 32, 8: 24, 16: 16, 32: 12, 64: 8}


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class NetConfig:
    """Shared topology for generator, critic, and auxiliary classifier."""

    latent_dim: int = 512
    base_resolution: int = 4
    final_resolution: int = 256
    channels: dict[int, int] = field(default_factory=lambda: dict(FULL_CHANNELS))
    condition_dim: int = 5
    ac_backbone: str = "xception"  # or "small"
    equalized_lr: bool = False
    minibatch_stddev: bool = False

    def __post_init__(self):
        if not _is_power_of_two(self.base_resolution) or not _is_power_of_two(
            self.final_resolution
        ):
            raise ConfigError("resolutions must be powers of two")
        if self.final_resolution < self.base_resolution:
            raise ConfigError("final resolution below base resolution")
        if self.latent_dim < 1 or self.condition_dim < 1:
            raise ConfigError("latent_dim and condition_dim must be positive")
        if self.ac_backbone not in ("small", "xception"):
            raise ConfigError(f"unknown ac_backbone {self.ac_backbone!r}")
        for res in self.stage_resolutions():
            ch = self.channels.get(res)
            if ch is None or ch < 1:
                raise ConfigError(f"missing/invalid channel count for resolution {res}")

    def stage_resolutions(self) -> list[int]:
        """All stage resolutions from base to final, inclusive."""
        res, out = self.base_resolution, []
        while res <= self.final_resolution:
            out.append(res)
            res *= 2
        return out

    @property
    def num_stages(self) -> int:
        return len(self.stage_resolutions())

    def to_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "base_resolution": self.base_resolution,
            "final_resolution": self.final_resolution,
            "channels": {str(k): v for k, v in self.channels.items()},
            "condition_dim": self.condition_dim,
            "ac_backbone": self.ac_backbone,
            "equalized_lr": self.equalized_lr,
            "minibatch_stddev": self.minibatch_stddev,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetConfig":
        d = dict(d)
        d["channels"] = {int(k): v for k, v in d["channels"].items()}
        return cls(**d)


def desk_config(condition_dim: int = 5, final_resolution: int = 64) -> NetConfig:
    """CPU-friendly profile: 64-dim latent, narrow channels, small AC."""
    channels = {r: c for r, c in DESK_CHANNELS.items() if r <= final_resolution}
    return NetConfig(
        latent_dim=64,
        base_resolution=4,
        final_resolution=final_resolution,
        channels=channels,
        condition_dim=condition_dim,
        ac_backbone="small",
    )


@dataclass(frozen=True)
class FadeState:
    """Where the progressive schedule currently stands.

    ``alpha`` blends the upsampled previous-stage pathway (0) into the
    new-stage pathway (1); stabilize phases are pinned at alpha = 1.
    """

    resolution: int
    alpha: float = 1.0
    mode: str = "stabilize"

    def __post_init__(self):
        if self.mode not in ("stabilize", "fade"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.mode == "stabilize" and self.alpha != 1.0:
            raise ConfigError("stabilize phases require alpha = 1")

    @classmethod
    def stable(cls, resolution: int) -> "FadeState":
        return cls(resolution=resolution, alpha=1.0, mode="stabilize")

    @classmethod
    def fading(cls, resolution: int, alpha: float) -> "FadeState":
        return cls(resolution=resolution, alpha=alpha, mode="fade")


def fade_blend(prev_path, new_path, alpha: float):
    """Linear blend (1 - alpha) * prev + alpha * new, elementwise."""
    if getattr(prev_path, "shape", None) != getattr(new_path, "shape", None):
        raise ShapeError(
            f"blend operands differ in shape: {prev_path.shape} vs {new_path.shape}"
        )
    return (1.0 - alpha) * prev_path + alpha * new_path
