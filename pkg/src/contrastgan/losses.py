"""Adversarial and conditioning losses plus the adaptive weight controller.

The critic objective is the Wasserstein loss with a gradient penalty on
random real/fake interpolates. Conditioning is learned through an
auxiliary classifier trained with a weighted multi-task loss (cross
entropy on orientation, squared error on unit-scaled TR/TE). The
generator's conditioning pressure is controlled per condition by an
adaptive weight gamma, raised while the classifier does worse on
generated images than on real ones and clamped to [0, tau]
(ControlGAN-style balancing).

Condition tensors everywhere follow the encoding
[tr_unit, te_unit, orientation one-hot...].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import torch

from .errors import ConfigError, NumericError, ShapeError

CONDITION_KEYS = ("iop", "te", "tr")

# Floor applied to predicted class probabilities before the log in the
# cross entropy; keeps a zero probability at the true class from
# producing -inf.
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class GanLossConfig:
    lambda_gp: float = 10.0
    lambda_iop: float = 1.0
    lambda_te: float = 10.0
    lambda_tr: float = 10.0

    def __post_init__(self):
        if min(self.lambda_gp, self.lambda_iop, self.lambda_te, self.lambda_tr) < 0:
            raise ConfigError("loss weights must be non-negative")


def _default_gamma() -> dict[str, float]:
    return {k: 0.0 for k in CONDITION_KEYS}


def _default_tau() -> dict[str, float]:
    return {k: 100.0 for k in CONDITION_KEYS}


@dataclass(frozen=True)
class AdaptiveWeightState:
    """Per-condition loss weights gamma with their controller constants.

    gamma starts at zero, moves by r times the gap between the
    classifier's loss on generated and (e_hat-scaled) real images, and
    is clamped to [0, tau] per condition.
    """

    gamma: dict[str, float] = field(default_factory=_default_gamma)
    r: float = 0.01
    tau: dict[str, float] = field(default_factory=_default_tau)
    e_hat: float = 1.0

    def __post_init__(self):
        for k in CONDITION_KEYS:
            if k not in self.gamma or k not in self.tau:
                raise ConfigError(f"missing condition key {k!r}")
            if not 0.0 <= self.gamma[k] <= self.tau[k]:
                raise ConfigError(f"gamma[{k}]={self.gamma[k]} outside [0, {self.tau[k]}]")

    def to_dict(self) -> dict:
        return {"gamma": dict(self.gamma), "r": self.r, "tau": dict(self.tau), "e_hat": self.e_hat}

    @classmethod
    def from_dict(cls, d: dict) -> "AdaptiveWeightState":
        return cls(gamma=dict(d["gamma"]), r=d["r"], tau=dict(d["tau"]), e_hat=d["e_hat"])


def update_adaptive_weights(
    state: AdaptiveWeightState,
    gen_parts: dict[str, float],
    real_parts: dict[str, float],
) -> AdaptiveWeightState:
    """One controller step: gamma' = clamp(gamma + r*(gen - e_hat*real))."""
    new_gamma = {}
    for k in CONDITION_KEYS:
        step = state.r * (float(gen_parts[k]) - state.e_hat * float(real_parts[k]))
        new_gamma[k] = min(state.tau[k], max(0.0, state.gamma[k] + step))
    return replace(state, gamma=new_gamma)


def steps_to_saturation(tau: float, r: float, constant_gen_loss: float) -> int:
    """Closed form: steps until gamma hits tau when real losses are zero."""
    if r <= 0 or constant_gen_loss <= 0:
        raise ConfigError("saturation requires positive r and loss")
    return math.ceil(tau / (r * constant_gen_loss))


def split_condition_tensor(cond: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(tr_unit, te_unit, onehot) columns of an encoded condition batch."""
    if cond.ndim != 2 or cond.shape[1] < 3:
        raise ShapeError(f"condition batch must be (n, >=3), got {tuple(cond.shape)}")
    return cond[:, 0], cond[:, 1], cond[:, 2:]


def gradient_penalty(
    critic: Callable[[torch.Tensor], torch.Tensor],
    real_batch: torch.Tensor,
    fake_batch: torch.Tensor,
    lambda_gp: float = 10.0,
    rng: torch.Generator | None = None,
) -> torch.Tensor:
    """Two-sided gradient penalty on straight-line interpolates.

    One epsilon ~ U[0,1] per sample mixes real and fake; the penalty is
    lambda_gp * mean((||grad critic(x_hat)||_2 - 1)^2).
    """
    if real_batch.shape != fake_batch.shape:
        raise ShapeError(
            f"real {tuple(real_batch.shape)} and fake {tuple(fake_batch.shape)} batches differ"
        )
    n = real_batch.shape[0]
    eps_shape = (n,) + (1,) * (real_batch.ndim - 1)
    eps = torch.rand(eps_shape, generator=rng, dtype=real_batch.dtype)
    x_hat = (eps * real_batch + (1.0 - eps) * fake_batch).detach().requires_grad_(True)
    scores = critic(x_hat)
    if scores.requires_grad:
        # allow_unused covers critics with partial input dependence
        grads = torch.autograd.grad(
            scores.sum(), x_hat, create_graph=True, allow_unused=True
        )[0]
    else:  # critic ignored its input entirely: zero gradient
        grads = None
    if grads is None:
        grads = torch.zeros_like(x_hat)
    if not torch.isfinite(grads).all():
        raise NumericError("non-finite critic gradient in penalty term")
    norms = grads.flatten(1).norm(2, dim=1)
    return lambda_gp * ((norms - 1.0) ** 2).mean()


def critic_loss(
    critic: Callable[[torch.Tensor], torch.Tensor],
    real_batch: torch.Tensor,
    fake_batch: torch.Tensor,
    cfg: GanLossConfig | None = None,
    rng: torch.Generator | None = None,
) -> torch.Tensor:
    """mean D(fake) - mean D(real) + gradient penalty."""
    cfg = cfg or GanLossConfig()
    gp = gradient_penalty(critic, real_batch, fake_batch, cfg.lambda_gp, rng)
    return critic(fake_batch).mean() - critic(real_batch).mean() + gp


def generator_adv_loss(
    critic: Callable[[torch.Tensor], torch.Tensor], fake_batch: torch.Tensor
) -> torch.Tensor:
    """-mean D(fake)."""
    return -critic(fake_batch).mean()


class AcLossParts(NamedTuple):
    total: torch.Tensor
    parts: dict[str, torch.Tensor]


def ac_condition_losses(pred, cond: torch.Tensor) -> dict[str, torch.Tensor]:
    """Unweighted per-condition losses of classifier outputs vs targets.

    ``pred`` is the (probs, tr, te) triple of the classifier; ``cond``
    the encoded target batch. Orientation uses cross entropy with a
    probability floor, TR/TE use mean squared error on the unit scale.
    """
    probs, tr_pred, te_pred = pred
    tr_true, te_true, onehot = split_condition_tensor(cond)
    if probs.shape != onehot.shape:
        raise ShapeError(
            f"orientation probabilities {tuple(probs.shape)} vs one-hot {tuple(onehot.shape)}"
        )
    picked = (probs * onehot).sum(dim=1).clamp_min(PROB_FLOOR)
    return {
        "iop": -(torch.log(picked)).mean(),
        "te": ((te_pred - te_true) ** 2).mean(),
        "tr": ((tr_pred - tr_true) ** 2).mean(),
    }


def ac_loss(pred, cond: torch.Tensor, cfg: GanLossConfig | None = None) -> AcLossParts:
    """Multi-task classifier loss: lambda-weighted sum of the parts."""
    cfg = cfg or GanLossConfig()
    parts = ac_condition_losses(pred, cond)
    total = cfg.lambda_iop * parts["iop"] + cfg.lambda_te * parts["te"] + cfg.lambda_tr * parts["tr"]
    return AcLossParts(total=total, parts=parts)


class GeneratorLoss(NamedTuple):
    total: torch.Tensor
    parts: dict[str, torch.Tensor]  # gamma-weighted conditioning terms
    raw_parts: dict[str, torch.Tensor]  # unweighted, feeds the controller
    adv: torch.Tensor


def conditioned_generator_loss(
    critic: Callable[[torch.Tensor], torch.Tensor],
    ac,
    fake_batch: torch.Tensor,
    cond: torch.Tensor,
    state: AdaptiveWeightState,
) -> GeneratorLoss:
    """Adversarial term plus gamma-weighted conditioning terms.

    With all gamma at zero this reduces to the pure adversarial
    objective (the pre-growth regime).
    """
    adv = generator_adv_loss(critic, fake_batch)
    raw = ac_condition_losses(ac(fake_batch), cond)
    weighted = {k: state.gamma[k] * raw[k] for k in CONDITION_KEYS}
    total = adv + weighted["iop"] + weighted["te"] + weighted["tr"]
    return GeneratorLoss(total=total, parts=weighted, raw_parts=raw, adv=adv)
