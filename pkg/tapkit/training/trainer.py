"""
REINFORCE training with a learned critic (or moving-average) baseline.

Each batch is rolled out in sample mode. The actor minimises
``mean(-(R - b) * sum_t log p(y_t)) - entropy_coef * mean(H)`` with the
baseline ``b`` detached; the critic minimises ``mean((V - R) ** 2)``. Actor
and critic gradients are computed for their own parameters only and clipped
separately before one step of each optimizer.
"""

import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence, Union

import numpy as np
import pandas as pd
import torch
import torch.nn as nn

from ..core.instance import ProblemInstance
from ..exceptions import TapCapacityError, TapTrainingError, TapValueError
from ..io.readers import dumps, instance_to_dict, to_csv
from ..policy.checkpoint import save_checkpoint
from ..policy.network import PackingPolicy
from ..policy.rollout import rollout_batch
from ..utils.helpers import atomic_write
from .config import TrainConfig
from .evaluation import evaluate

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

BEST_CHECKPOINT = "best.pt"
LAST_CHECKPOINT = "last.pt"
CURVE_FILE = "curve.csv"
CURVE_COLUMNS = ["epoch", "C", "P", "S", "R", "actor_loss", "critic_loss", "eval_R"]


@dataclass
class TrainResult:
    """Outcome of :func:`train`."""

    policy: PackingPolicy
    curve: pd.DataFrame
    best_reward: float
    best_epoch: int
    out_dir: Optional[Path]

    @property
    def best_checkpoint(self) -> Optional[Path]:
        return None if self.out_dir is None else self.out_dir / BEST_CHECKPOINT


def split_parameters(policy: PackingPolicy) -> Dict[str, List[nn.Parameter]]:
    """Critic head parameters versus everything else."""
    critic = list(policy.critic.parameters())
    ids = {id(p) for p in critic}
    actor = [p for p in policy.parameters() if id(p) not in ids]
    return {"actor": actor, "critic": critic}


def _check_dataset(instances: Sequence[ProblemInstance], capacity: int, name: str) -> None:
    if not instances:
        raise TapValueError(f"The {name} set is empty")
    largest = max(inst.n_boxes for inst in instances)
    if largest > capacity:
        raise TapCapacityError(largest, capacity)


def dump_batch(
    out_dir: Optional[Path],
    epoch: int,
    batch: int,
    instances: Sequence[ProblemInstance],
    info: Dict[str, Any],
) -> Optional[str]:
    """Write the instances of a failing batch next to the run outputs."""
    if out_dir is None:
        return None
    path = out_dir / f"failed_batch_e{epoch:04d}_b{batch:05d}.json"
    payload = {
        "epoch": epoch,
        "batch": batch,
        "info": info,
        "instances": [instance_to_dict(inst) for inst in instances],
    }
    with atomic_write(path) as handle:
        handle.write(dumps(payload))
    return str(path)


def _finite(*values: torch.Tensor) -> bool:
    return all(bool(torch.isfinite(v).all()) for v in values)


class Trainer:
    """
    Stateful training loop; :func:`train` is the usual entry point.

    Parameters
    ----------
    cfg : TrainConfig
    policy : PackingPolicy
    out_dir : path, optional
        Checkpoints, curve and failure dumps; nothing is written when omitted
    """

    def __init__(
        self, cfg: TrainConfig, policy: PackingPolicy, out_dir: Optional[PathLike] = None
    ):
        self.cfg = cfg
        self.policy = policy
        self.out_dir = None if out_dir is None else Path(out_dir)
        groups = split_parameters(policy)
        self.actor_params = groups["actor"]
        self.critic_params = groups["critic"]
        self.actor_opt = torch.optim.Adam(self.actor_params, lr=cfg.actor_lr)
        self.critic_opt = torch.optim.Adam(self.critic_params, lr=cfg.critic_lr)
        self.generator = torch.Generator().manual_seed(cfg.seed)
        self.shuffle_rng = np.random.default_rng(cfg.seed)
        self.ema: Optional[float] = None
        self.epoch = 0
        self.batch_index = 0

    # ------------------------------------------------------------------
    # Losses
    # ------------------------------------------------------------------

    def baseline(self, values: torch.Tensor, rewards: torch.Tensor) -> torch.Tensor:
        if self.cfg.baseline == "critic":
            return values.detach()
        mean = float(rewards.mean())
        if self.ema is None:
            self.ema = mean
        else:
            self.ema = self.cfg.ema_beta * self.ema + (1.0 - self.cfg.ema_beta) * mean
        return torch.full_like(rewards, self.ema)

    def step(self, instances: Sequence[ProblemInstance]) -> Dict[str, float]:
        """
        One gradient step on one batch.

        Raises
        ------
        TapTrainingError
            If a loss or gradient is not finite; the batch is dumped first
        """
        self.policy.train()
        result = rollout_batch(
            self.policy, instances, self.cfg.placement, "sample", self.generator
        )
        rewards = result.rewards
        advantage = rewards - self.baseline(result.values, rewards)
        actor_loss = (-advantage * result.log_probs).mean()
        actor_loss = actor_loss - self.cfg.entropy_coef * result.entropy.mean()
        critic_loss = ((result.values - rewards) ** 2).mean()

        info: Dict[str, Any] = {
            "actor_loss": float(actor_loss.detach()),
            "critic_loss": float(critic_loss.detach()),
            "rewards": [float(r) for r in rewards],
        }
        if not _finite(actor_loss, critic_loss):
            self._abort("loss", instances, info)

        self.actor_opt.zero_grad()
        self.critic_opt.zero_grad()
        actor_loss.backward(inputs=self.actor_params, retain_graph=True)
        if self.cfg.baseline == "critic":
            critic_loss.backward(inputs=self.critic_params)
        actor_norm = nn.utils.clip_grad_norm_(self.actor_params, self.cfg.clip)
        critic_norm = nn.utils.clip_grad_norm_(self.critic_params, self.cfg.clip)
        if not _finite(actor_norm, critic_norm):
            info.update(actor_grad_norm=float(actor_norm), critic_grad_norm=float(critic_norm))
            self._abort("gradient", instances, info)
        self.actor_opt.step()
        if self.cfg.baseline == "critic":
            self.critic_opt.step()
        self.batch_index += 1

        breakdowns = [sol.reward for sol in result.solutions]
        return {
            "C": float(np.mean([r.C for r in breakdowns])),
            "P": float(np.mean([r.P for r in breakdowns])),
            "S": float(np.mean([r.S for r in breakdowns])),
            "R": float(np.mean([r.R for r in breakdowns])),
            "actor_loss": float(actor_loss.detach()),
            "critic_loss": float(critic_loss.detach()),
        }

    def _abort(
        self, what: str, instances: Sequence[ProblemInstance], info: Dict[str, Any]
    ) -> NoReturn:
        path = dump_batch(self.out_dir, self.epoch, self.batch_index, instances, info)
        raise TapTrainingError(
            f"non-finite {what} at epoch {self.epoch}, batch {self.batch_index}", path
        )

    # ------------------------------------------------------------------
    # Epochs
    # ------------------------------------------------------------------

    def run_epoch(self, dataset: Sequence[ProblemInstance]) -> Dict[str, float]:
        order = self.shuffle_rng.permutation(len(dataset))
        size = self.cfg.batch_size
        stats: List[Dict[str, float]] = []
        weights: List[int] = []
        for start in range(0, len(order), size):
            batch = [dataset[i] for i in order[start : start + size]]
            stats.append(self.step(batch))
            weights.append(len(batch))
        return {
            key: float(np.average([s[key] for s in stats], weights=weights)) for key in stats[0]
        }

    def held_out_reward(self, test: Sequence[ProblemInstance]) -> float:
        self.policy.eval()
        df = evaluate(test, "net", self.policy, self.cfg.placement, "argmax", self.cfg.seed)
        return float(df["R"].mean())

    def save(self, name: str, meta: Dict[str, Any]) -> None:
        if self.out_dir is not None:
            save_checkpoint(self.out_dir / name, self.policy, meta)


def train(
    cfg: TrainConfig,
    dataset: Sequence[ProblemInstance],
    test: Optional[Sequence[ProblemInstance]] = None,
    out_dir: Optional[PathLike] = None,
) -> TrainResult:
    """
    Train a policy on ``dataset``.

    Parameters
    ----------
    cfg : TrainConfig
    dataset : sequence of ProblemInstance
        Every instance must fit ``cfg.capacity``
    test : sequence of ProblemInstance, optional
        Held-out split for the periodic argmax evaluation; the first
        ``eval_size`` training instances are used when omitted
    out_dir : path, optional
        Receives ``best.pt``, ``last.pt`` and ``curve.csv``; nothing is written
        when omitted (``tap train`` passes ``cfg.out_dir``)

    Returns
    -------
    TrainResult
        The best policy (by held-out reward), the curve and where it was saved

    Raises
    ------
    TapCapacityError
        If an instance exceeds the capacity
    TapTrainingError
        If a loss becomes non-finite
    """
    _check_dataset(dataset, cfg.capacity, "training")
    if test is None:
        test = list(dataset[: cfg.eval_size or len(dataset)])
    elif cfg.eval_size:
        test = list(test[: cfg.eval_size])
    _check_dataset(test, cfg.capacity, "held-out")

    torch.manual_seed(cfg.seed)
    policy = PackingPolicy(cfg.policy_config(dataset[0]))
    target = None if out_dir is None else Path(out_dir)
    trainer = Trainer(cfg, policy, target)

    rows = []
    best_reward = -math.inf
    best_epoch = 0
    best_state = {k: v.detach().clone() for k, v in policy.state_dict().items()}
    for epoch in range(1, cfg.epochs + 1):
        trainer.epoch = epoch
        stats = trainer.run_epoch(dataset)
        eval_r = math.nan
        if epoch % cfg.eval_every == 0 or epoch == cfg.epochs:
            eval_r = trainer.held_out_reward(test)
            if eval_r > best_reward:
                best_reward, best_epoch = eval_r, epoch
                best_state = {k: v.detach().clone() for k, v in policy.state_dict().items()}
                trainer.save(BEST_CHECKPOINT, {"epoch": epoch, "eval_R": eval_r, **cfg.to_dict()})
        rows.append({"epoch": epoch, **stats, "eval_R": eval_r})
        logger.info(
            "epoch %d: R=%.4f actor=%.4f critic=%.4f eval_R=%.4f",
            epoch,
            stats["R"],
            stats["actor_loss"],
            stats["critic_loss"],
            eval_r,
        )

    trainer.save(LAST_CHECKPOINT, {"epoch": cfg.epochs, **cfg.to_dict()})
    curve = pd.DataFrame(rows, columns=CURVE_COLUMNS)
    if target is not None:
        to_csv(curve, target / CURVE_FILE)

    policy.load_state_dict(best_state)
    policy.eval()
    return TrainResult(policy, curve, best_reward, best_epoch, target)
