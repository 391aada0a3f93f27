"""Convolutional building blocks shared by generator and critic."""

from __future__ import annotations

import math

import torch
from torch import nn
from torch.nn import functional as F


class EqualizedConv2d(nn.Module):
    """Conv layer with runtime He scaling (equalized learning rate)."""

    def __init__(self, cin: int, cout: int, kernel: int, padding: int = 0):
        super().__init__()
        self.weight = nn.Parameter(torch.randn(cout, cin, kernel, kernel))
        self.bias = nn.Parameter(torch.zeros(cout))
        self.scale = math.sqrt(2.0 / (cin * kernel * kernel))
        self.padding = padding

    def forward(self, x):
        return F.conv2d(x, self.weight * self.scale, self.bias, padding=self.padding)


def conv2d(cin: int, cout: int, kernel: int, padding: int = 0, equalized: bool = False):
    if equalized:
        return EqualizedConv2d(cin, cout, kernel, padding=padding)
    return nn.Conv2d(cin, cout, kernel, padding=padding)


class ConvPair(nn.Module):
    """Two 3x3 convs with leaky-ReLU activations; resolution preserved."""

    def __init__(self, cin: int, cout: int, equalized: bool = False):
        super().__init__()
        self.c1 = conv2d(cin, cout, 3, padding=1, equalized=equalized)
        self.c2 = conv2d(cout, cout, 3, padding=1, equalized=equalized)

    def forward(self, x):
        x = F.leaky_relu(self.c1(x), 0.2)
        return F.leaky_relu(self.c2(x), 0.2)


class MinibatchStdDev(nn.Module):
    """Append the batch-wide feature stddev as one constant channel."""

    def forward(self, x):
        std = x.std(dim=0, unbiased=False).mean()
        feat = std.expand(x.shape[0], 1, x.shape[2], x.shape[3])
        return torch.cat([x, feat], dim=1)


def upsample2x(x):
    """Nearest-neighbour 2x upsampling (commutes with elementwise maps)."""
    return F.interpolate(x, scale_factor=2, mode="nearest")


def downsample2x(x):
    """2x2 average pooling."""
    return F.avg_pool2d(x, 2)
