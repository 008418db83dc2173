"""
Training configuration.

``tap train --config cfg.json`` reads a flat JSON object whose keys are the
fields of :class:`TrainConfig`; unknown keys are rejected.
"""

import json
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional, Union

from ..core.instance import ProblemInstance
from ..exceptions import TapIOError, TapValueError
from ..packing.container import HEIGHT_MODES
from ..packing.placement import STRATEGIES
from ..policy.network import DECODER_INPUTS, DYNAMIC_MODES, PolicyConfig

BASELINES = ("critic", "ema")

PathLike = Union[str, os.PathLike]


@dataclass(frozen=True)
class TrainConfig:
    """
    REINFORCE training settings.

    Parameters
    ----------
    batch_size : int
    epochs : int
        Passes over the training set
    actor_lr, critic_lr : float
        Adam learning rates
    clip : float
        Gradient-norm clip applied to actor and critic separately
    entropy_coef : float
        Weight of the entropy bonus in the actor loss
    train_path, test_path : str, optional
        Dataset directories (or single instance files); the test split is
        used for the periodic argmax evaluation
    out_dir : str
        Where checkpoints, the curve CSV and failure dumps go
    height_mode : {'raw', 'zero-min', 'gradient'}
    placement : {'lb', 'mul', 'macs'}
    seed : int
    capacity : int
        Box slots of the network
    baseline : {'critic', 'ema'}
        Learned critic, or an exponential moving average of batch rewards
    ema_beta : float
        Decay of the moving-average baseline
    eval_every : int
        Epochs between held-out evaluations
    eval_size : int
        Held-out instances evaluated each time (all when 0)
    """

    batch_size: int = 128
    epochs: int = 10
    actor_lr: float = 1e-4
    critic_lr: float = 1e-4
    clip: float = 2.0
    entropy_coef: float = 0.0
    train_path: Optional[str] = None
    test_path: Optional[str] = None
    out_dir: str = "runs"
    height_mode: str = "gradient"
    placement: str = "lb"
    seed: int = 0
    capacity: int = 10
    baseline: str = "critic"
    ema_beta: float = 0.9
    eval_every: int = 1
    eval_size: int = 0
    static_dim: int = 64
    dynamic_dim: int = 64
    height_dim: int = 64
    critic_dim: int = 64
    dynamic_mode: str = "full"
    decoder_input: str = "both"

    def __post_init__(self) -> None:
        for name in ("batch_size", "epochs", "capacity", "eval_every"):
            if getattr(self, name) < 1:
                raise TapValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("actor_lr", "critic_lr", "clip"):
            if not getattr(self, name) > 0:
                raise TapValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.entropy_coef < 0 or self.eval_size < 0:
            raise TapValueError("entropy_coef and eval_size must be >= 0")
        if not 0.0 <= self.ema_beta < 1.0:
            raise TapValueError(f"ema_beta must be in [0, 1), got {self.ema_beta}")
        if self.height_mode not in HEIGHT_MODES:
            raise TapValueError(f"height_mode must be one of {HEIGHT_MODES}")
        if self.placement not in STRATEGIES:
            raise TapValueError(f"placement must be one of {STRATEGIES}")
        if self.baseline not in BASELINES:
            raise TapValueError(f"baseline must be one of {BASELINES}")
        if self.dynamic_mode not in DYNAMIC_MODES:
            raise TapValueError(f"dynamic_mode must be one of {DYNAMIC_MODES}")
        if self.decoder_input not in DECODER_INPUTS:
            raise TapValueError(f"decoder_input must be one of {DECODER_INPUTS}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise TapValueError(f"Unknown training settings: {unknown}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: PathLike) -> "TrainConfig":
        """
        Load settings from a JSON file.

        Raises
        ------
        TapIOError
            If the file cannot be read or parsed
        TapValueError
            If a key is unknown or a value is out of range
        """
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise TapIOError(f"Failed to read config {path}: {str(e)}") from e
        if not isinstance(data, dict):
            raise TapValueError(f"Config {path} must hold a JSON object")
        return cls.from_dict(data)

    def policy_config(self, inst: ProblemInstance) -> PolicyConfig:
        """Network shape for instances shaped like ``inst``."""
        return PolicyConfig(
            capacity=self.capacity,
            dims_mode=inst.dims_mode,
            target_width=inst.target_width,
            target_depth=inst.target_depth if inst.dims_mode == 3 else 1,
            container_count=inst.container_count,
            static_dim=self.static_dim,
            dynamic_dim=self.dynamic_dim,
            height_dim=self.height_dim,
            critic_dim=self.critic_dim,
            height_mode=self.height_mode,
            dynamic_mode=self.dynamic_mode,
            decoder_input=self.decoder_input,
        )
