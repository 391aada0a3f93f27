"""Network construction: generator, critic, and auxiliary classifier."""

from .aux import AuxClassifier
from .config import DESK_CHANNELS, FULL_CHANNELS, FadeState, NetConfig, desk_config, fade_blend
from .critic import Critic
from .generator import Generator


def build_generator(cfg: NetConfig) -> Generator:
    return Generator(cfg)


def build_discriminator(cfg: NetConfig) -> Critic:
    return Critic(cfg)


def build_ac(cfg: NetConfig) -> AuxClassifier:
    return AuxClassifier(cfg)


def grow_to(net, resolution: int):
    """Grow a progressive network until it reaches ``resolution``."""
    while net.resolution < resolution:
        net.grow()
    return net


__all__ = [
    "NetConfig",
    "FadeState",
    "fade_blend",
    "desk_config",
    "DESK_CHANNELS",
    "FULL_CHANNELS",
    "Generator",
    "Critic",
    "AuxClassifier",
    "build_generator",
    "build_discriminator",
    "build_ac",
    "grow_to",
]
