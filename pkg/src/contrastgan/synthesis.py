"""Deterministic latent derivation and batched image generation.

Latents are drawn from NumPy's default PCG64 generator seeded with the
request seed: ``default_rng(seed).standard_normal((count, latent_dim))``
row-major. Clients in any language can reproduce the exact latents from
the seed with that recipe.
"""

from __future__ import annotations

import numpy as np
import torch

from .conditions import ConditionSpace, encode_conditions
from .models import FadeState, Generator


def latents_from_seed(seed: int, count: int, latent_dim: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((count, latent_dim))


def generate_batch(
    generator: Generator,
    latents: np.ndarray,
    conditions,
    space: ConditionSpace,
    batch_size: int = 32,
) -> np.ndarray:
    """Generate images for (latent, condition) pairs; returns (n, H, W).

    Runs the generator in inference mode at its grown resolution;
    deterministic for fixed inputs.
    """
    latents = np.atleast_2d(np.asarray(latents, dtype=np.float64))
    cond = encode_conditions(conditions, space)
    if latents.shape[0] != cond.shape[0]:
        raise ValueError(f"{latents.shape[0]} latents vs {cond.shape[0]} conditions")
    fade = FadeState.stable(generator.resolution)
    was_training = generator.training
    generator.eval()
    outs = []
    with torch.no_grad():
        for i in range(0, latents.shape[0], batch_size):
            z = torch.from_numpy(latents[i : i + batch_size]).float()
            c = torch.from_numpy(cond[i : i + batch_size]).float()
            outs.append(generator(z, c, fade)[:, 0].numpy())
    if was_training:
        generator.train()
    return np.concatenate(outs, axis=0)
