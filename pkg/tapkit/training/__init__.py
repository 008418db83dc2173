"""
Training and evaluation for tapkit.

- config: TrainConfig
- trainer: REINFORCE with a critic or moving-average baseline
- evaluation: per-instance metric tables for any method
"""

from .config import BASELINES, TrainConfig
from .evaluation import METHODS, evaluate, resolve_policy, solve_instance, summarize
from .trainer import (
    BEST_CHECKPOINT,
    CURVE_FILE,
    LAST_CHECKPOINT,
    Trainer,
    TrainResult,
    split_parameters,
    train,
)

__all__ = [
    # Configuration
    "TrainConfig",
    "BASELINES",
    # Training
    "train",
    "Trainer",
    "TrainResult",
    "split_parameters",
    "BEST_CHECKPOINT",
    "LAST_CHECKPOINT",
    "CURVE_FILE",
    # Evaluation
    "METHODS",
    "evaluate",
    "summarize",
    "solve_instance",
    "resolve_policy",
]
