"""Progressively growing Wasserstein critic (unbounded realness score)."""

from __future__ import annotations

import torch
from torch import nn
from torch.nn import functional as F

from ..errors import ConfigError, ShapeError
from .blocks import ConvPair, MinibatchStdDev, conv2d, downsample2x
from .config import FadeState, NetConfig, fade_blend


class Critic(nn.Module):
    """Scores images; mirrors the generator topology with downsampling.

    No output nonlinearity and no condition input: realness only. During
    a fade phase the freshly added high-resolution pathway is blended
    with the previous stage's input pathway.
    """

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self._stages = [cfg.base_resolution]
        ch0 = cfg.channels[cfg.base_resolution]
        eq = cfg.equalized_lr
        self.from_image = nn.ModuleList([conv2d(1, ch0, 1, equalized=eq)])
        self.blocks = nn.ModuleList()
        self.mbstd = MinibatchStdDev() if cfg.minibatch_stddev else None
        base_in = ch0 + (1 if cfg.minibatch_stddev else 0)
        self.base_block = ConvPair(base_in, ch0, equalized=eq)
        self.score = nn.Linear(ch0 * cfg.base_resolution**2, 1)

    @property
    def resolution(self) -> int:
        return self._stages[-1]

    def grow(self) -> int:
        new_res = self.resolution * 2
        if new_res > self.cfg.final_resolution:
            raise ConfigError(f"cannot grow beyond final resolution {self.cfg.final_resolution}")
        cin = self.cfg.channels[new_res]
        cout = self.cfg.channels[self.resolution]
        eq = self.cfg.equalized_lr
        self.blocks.append(ConvPair(cin, cout, equalized=eq))
        self.from_image.append(conv2d(1, cin, 1, equalized=eq))
        self._stages.append(new_res)
        return new_res

    def forward(self, img: torch.Tensor, fade: FadeState) -> torch.Tensor:
        if img.ndim != 4 or img.shape[1] != 1:
            raise ShapeError(f"expected (batch, 1, H, W) image, got {tuple(img.shape)}")
        if img.shape[-1] != self.resolution or img.shape[-2] != self.resolution:
            raise ShapeError(
                f"image at {tuple(img.shape[-2:])}, critic grown to {self.resolution}"
            )
        if fade.resolution != self.resolution:
            raise ShapeError(f"fade state at {fade.resolution}, critic at {self.resolution}")
        if fade.mode == "fade" and not self.blocks:
            raise ShapeError("cannot fade at the base resolution")

        if self.blocks:
            x = F.leaky_relu(self.from_image[-1](img), 0.2)
            x = downsample2x(self.blocks[-1](x))
            if fade.mode == "fade":
                prev = F.leaky_relu(self.from_image[-2](downsample2x(img)), 0.2)
                x = fade_blend(prev, x, fade.alpha)
            for block in reversed(self.blocks[:-1]):
                x = downsample2x(block(x))
        else:
            x = F.leaky_relu(self.from_image[0](img), 0.2)

        if self.mbstd is not None:
            x = self.mbstd(x)
        x = self.base_block(x)
        return self.score(x.flatten(1)).squeeze(-1)
