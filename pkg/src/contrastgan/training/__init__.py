"""Training orchestration: schedules, pretraining, the GAN loop, checkpoints."""

from .ac_pretrain import PretrainResult, pretrain_ac
from .augment import ALL_OPS, DEFAULT_OPS, augment_batch, augment_image
from .checkpoint import CHECKPOINT_VERSION, Checkpoint, load_checkpoint, save_checkpoint
from .config import DESK_GAMMA_RATE, TrainConfig, desk_adaptive_state, desk_train_config
from .gan_loop import TrainResult, parameter_checksum, train_gan
from .schedule import FADE, STABILIZE, PhaseStep, ProgressivePhase, fade_alpha, make_schedule, phase_batches
from .telemetry import TelemetryWriter, read_telemetry

__all__ = [
    "ProgressivePhase",
    "PhaseStep",
    "make_schedule",
    "phase_batches",
    "fade_alpha",
    "STABILIZE",
    "FADE",
    "TrainConfig",
    "desk_train_config",
    "desk_adaptive_state",
    "DESK_GAMMA_RATE",
    "augment_image",
    "augment_batch",
    "DEFAULT_OPS",
    "ALL_OPS",
    "pretrain_ac",
    "PretrainResult",
    "train_gan",
    "TrainResult",
    "parameter_checksum",
    "save_checkpoint",
    "load_checkpoint",
    "Checkpoint",
    "CHECKPOINT_VERSION",
    "TelemetryWriter",
    "read_telemetry",
]
