"""Auxiliary classifier: reads orientation, TR, and TE back from an image.

Two backbones: a compact plain-conv stack for small resolutions and an
Xception-style separable-convolution network for full scale. Heads are
shared: softmax over orientations plus two unbounded regression outputs
on the unit scale.
"""

from __future__ import annotations

import torch
from torch import nn
from torch.nn import functional as F

from ..errors import ShapeError
from .config import NetConfig


class SeparableConv2d(nn.Module):
    def __init__(self, cin: int, cout: int):
        super().__init__()
        self.depthwise = nn.Conv2d(cin, cin, 3, padding=1, groups=cin)
        self.pointwise = nn.Conv2d(cin, cout, 1)

    def forward(self, x):
        return self.pointwise(self.depthwise(x))


class _XceptionBlock(nn.Module):
    """Two separable convs + pooling with a strided 1x1 residual."""

    def __init__(self, cin: int, cout: int):
        super().__init__()
        self.sep1 = SeparableConv2d(cin, cout)
        self.bn1 = nn.BatchNorm2d(cout)
        self.sep2 = SeparableConv2d(cout, cout)
        self.bn2 = nn.BatchNorm2d(cout)
        self.skip = nn.Conv2d(cin, cout, 1, stride=2)

    def forward(self, x):
        y = self.bn1(self.sep1(F.relu(x)))
        y = self.bn2(self.sep2(F.relu(y)))
        y = F.max_pool2d(y, 3, stride=2, padding=1)
        return y + self.skip(x)


class XceptionBackbone(nn.Module):
    def __init__(self):
        super().__init__()
        self.entry = nn.Sequential(
            nn.Conv2d(1, 32, 3, stride=2, padding=1),
            nn.BatchNorm2d(32),
            nn.ReLU(),
            nn.Conv2d(32, 64, 3, padding=1),
            nn.BatchNorm2d(64),
            nn.ReLU(),
        )
        self.blocks = nn.Sequential(
            _XceptionBlock(64, 128),
            _XceptionBlock(128, 192),
            _XceptionBlock(192, 256),
        )
        self.exit = nn.Sequential(SeparableConv2d(256, 384), nn.BatchNorm2d(384), nn.ReLU())
        self.out_features = 384

    def forward(self, x):
        x = self.entry(x)
        x = self.blocks(x)
        x = self.exit(x)
        return F.adaptive_avg_pool2d(x, 1).flatten(1)


class SmallBackbone(nn.Module):
    """Plain conv stack for desk-scale inputs; widths double per pool.

    The final feature map is flattened, not pooled: orientation layouts
    can differ purely in where structures sit, which translation
    invariant pooling would erase.
    """

    def __init__(self, resolution: int):
        super().__init__()
        layers = [nn.Conv2d(1, 8, 3, padding=1), nn.LeakyReLU(0.2)]
        width, side = 8, resolution
        while side > 8:
            nxt = min(width * 2, 64)
            layers += [
                nn.AvgPool2d(2),
                nn.Conv2d(width, nxt, 3, padding=1),
                nn.LeakyReLU(0.2),
            ]
            width, side = nxt, side // 2
        self.body = nn.Sequential(*layers)
        self.head = nn.Linear(width * side * side, 128)
        self.out_features = 128

    def forward(self, x):
        x = self.body(x).flatten(1)
        return F.leaky_relu(self.head(x), 0.2)


class AuxClassifier(nn.Module):
    """Image -> (orientation probabilities, tr_unit, te_unit)."""

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.n_orientations = cfg.condition_dim - 2
        if cfg.ac_backbone == "small":
            self.backbone = SmallBackbone(cfg.final_resolution)
        else:
            self.backbone = XceptionBackbone()
        feat = self.backbone.out_features
        self.orientation_head = nn.Linear(feat, self.n_orientations)
        self.tr_head = nn.Linear(feat, 1)
        self.te_head = nn.Linear(feat, 1)

    def forward(self, img: torch.Tensor):
        if img.ndim != 4 or img.shape[1] != 1:
            raise ShapeError(f"expected (batch, 1, H, W) image, got {tuple(img.shape)}")
        if img.shape[-1] != self.cfg.final_resolution or img.shape[-2] != self.cfg.final_resolution:
            raise ShapeError(
                f"classifier expects {self.cfg.final_resolution}px input, got {tuple(img.shape[-2:])}"
            )
        feat = self.backbone(img)
        probs = torch.softmax(self.orientation_head(feat), dim=1)
        tr = self.tr_head(feat).squeeze(-1)
        te = self.te_head(feat).squeeze(-1)
        return probs, tr, te
