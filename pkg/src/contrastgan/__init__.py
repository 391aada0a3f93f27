"""contrastgan: MR-like image synthesis with acquisition-parameter control.

A progressively grown Wasserstein GAN generates 2D grayscale images
whose contrast follows continuous repetition/echo times and a
categorical orientation. A separately trained auxiliary classifier
guides the conditioning through ControlGAN-style adaptive loss weights
and doubles as the measurement instrument for conditioning fidelity.
"""

from .conditions import (
    ConditionSpace,
    ConditionVector,
    EncodedCondition,
    denormalize_condition,
    normalize_condition,
    validate_condition,
)
from .losses import AdaptiveWeightState, GanLossConfig

__version__ = "0.1.0"

__all__ = [
    "ConditionVector",
    "ConditionSpace",
    "EncodedCondition",
    "normalize_condition",
    "denormalize_condition",
    "validate_condition",
    "GanLossConfig",
    "AdaptiveWeightState",
    "__version__",
]
