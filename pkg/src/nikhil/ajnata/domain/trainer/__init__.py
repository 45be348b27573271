"""
Training loop: per-step unknown distillation, detection plus uncertainty
losses, plain SGD and the step log.
"""

from .train_config import TrainConfig
from .losses import UncertaintyTerms, detection_loss, uncertainty_loss, uncertainty_terms
from .trainer import TRAIN_LOG_HEADER, StepRecord, Trainer, TrainLog, train

__all__ = [
    "TrainConfig",
    "UncertaintyTerms",
    "detection_loss",
    "uncertainty_loss",
    "uncertainty_terms",
    "TRAIN_LOG_HEADER",
    "StepRecord",
    "Trainer",
    "TrainLog",
    "train",
]
