"""Progressively growing conditional generator."""

from __future__ import annotations

import torch
from torch import nn
from torch.nn import functional as F

from ..errors import ConfigError, ShapeError
from .blocks import ConvPair, conv2d, upsample2x
from .config import FadeState, NetConfig, fade_blend


class Generator(nn.Module):
    """Maps (latent, encoded condition) to an image in [-1, 1].

    The condition vector is concatenated to the latent at the input.
    Construction starts at the base resolution; :meth:`grow` appends one
    doubling block at a time, leaving previously trained parameters
    untouched. The active resolution must match the FadeState passed to
    :meth:`forward`.
    """

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self._stages = [cfg.base_resolution]
        ch0 = cfg.channels[cfg.base_resolution]
        eq = cfg.equalized_lr
        self.input = nn.Linear(cfg.latent_dim + cfg.condition_dim, ch0 * cfg.base_resolution**2)
        self.base_block = ConvPair(ch0, ch0, equalized=eq)
        self.blocks = nn.ModuleList()
        self.to_image = nn.ModuleList([conv2d(ch0, 1, 1, equalized=eq)])

    @property
    def resolution(self) -> int:
        return self._stages[-1]

    def grow(self) -> int:
        """Append the next doubling block; returns the new resolution."""
        new_res = self.resolution * 2
        if new_res > self.cfg.final_resolution:
            raise ConfigError(f"cannot grow beyond final resolution {self.cfg.final_resolution}")
        cin = self.cfg.channels[self.resolution]
        cout = self.cfg.channels[new_res]
        eq = self.cfg.equalized_lr
        self.blocks.append(ConvPair(cin, cout, equalized=eq))
        self.to_image.append(conv2d(cout, 1, 1, equalized=eq))
        self._stages.append(new_res)
        return new_res

    def forward(self, z: torch.Tensor, cond: torch.Tensor, fade: FadeState) -> torch.Tensor:
        if z.ndim != 2 or z.shape[1] != self.cfg.latent_dim:
            raise ShapeError(f"latent must be (batch, {self.cfg.latent_dim}), got {tuple(z.shape)}")
        if cond.ndim != 2 or cond.shape[1] != self.cfg.condition_dim:
            raise ShapeError(
                f"condition must be (batch, {self.cfg.condition_dim}), got {tuple(cond.shape)}"
            )
        if fade.resolution != self.resolution:
            raise ShapeError(
                f"fade state at {fade.resolution}, generator grown to {self.resolution}"
            )
        if fade.mode == "fade" and not self.blocks:
            raise ShapeError("cannot fade at the base resolution")

        x = F.leaky_relu(self.input(torch.cat([z, cond], dim=1)), 0.2)
        x = x.view(-1, self.cfg.channels[self.cfg.base_resolution],
                   self.cfg.base_resolution, self.cfg.base_resolution)
        x = self.base_block(x)
        if not self.blocks:
            return torch.tanh(self.to_image[0](x))

        for block in self.blocks[:-1]:
            x = block(upsample2x(x))
        prev = x
        x = self.blocks[-1](upsample2x(prev))
        new_path = self.to_image[-1](x)
        if fade.mode == "fade":
            skip = upsample2x(self.to_image[-2](prev))
            return torch.tanh(fade_blend(skip, new_path, fade.alpha))
        return torch.tanh(new_path)
