"""
Evaluation harness.

Runs a method over a set of instances and reports one row per instance
(``C``, ``P``, ``S``, ``R`` and the solve time in milliseconds) plus a
one-row summary in the layout of the usual comparison tables.
"""

import logging
import os
import time
from functools import partial
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch

from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapCapacityError, TapValueError
from ..packing.placement import STRATEGIES
from ..policy.checkpoint import load_checkpoint
from ..policy.network import PackingPolicy
from ..policy.rollout import ROLLOUT_MODES, rollout
from ..solvers.baselines import solve_exhaustive, solve_greedy, solve_random
from ..solvers.multi import solve_multi
from ..solvers.rolling import rolling_solve
from ..utils.helpers import derive_rng, parallel_map, timer

logger = logging.getLogger(__name__)

METHODS = ("net", "greedy", "random", "exhaustive")
METRIC_COLUMNS = ["C", "P", "S", "R"]

PathLike = Union[str, os.PathLike]
Model = Union[PackingPolicy, PathLike, None]


def torch_generator(seed: int, index: int) -> torch.Generator:
    """Sampling generator for instance ``index``, derived like the numpy streams."""
    value = int(derive_rng(seed, index).integers(2**62))
    return torch.Generator().manual_seed(value)


def resolve_policy(model: Model) -> Optional[PackingPolicy]:
    """A policy object, or a policy loaded from a checkpoint path."""
    if model is None or isinstance(model, PackingPolicy):
        return model
    policy, _ = load_checkpoint(model)
    return policy


def solve_instance(
    inst: ProblemInstance,
    method: str = "greedy",
    policy: Optional[PackingPolicy] = None,
    strategy: str = "lb",
    mode: str = "argmax",
    seed: Optional[int] = 0,
    index: int = 0,
    rolling: bool = False,
) -> Solution:
    """
    Solve one instance with any supported method.

    Parameters
    ----------
    method : {'net', 'greedy', 'random', 'exhaustive'}
    policy : PackingPolicy, optional
        Required for ``'net'``
    seed, index : int
        Select the random streams of ``'random'`` and sampled ``'net'`` runs
    rolling : bool
        Allow instances larger than the policy capacity

    Raises
    ------
    TapCapacityError
        If the instance exceeds the policy capacity and ``rolling`` is off
    """
    if method == "greedy":
        return solve_greedy(inst, strategy)
    if method == "random":
        return solve_random(inst, strategy, derive_rng(seed, index))
    if method == "exhaustive":
        return solve_exhaustive(inst, strategy)
    if method != "net":
        raise TapValueError(f"method must be one of {METHODS}, got '{method}'")
    if policy is None:
        raise TapValueError("method='net' needs a model")

    generator = torch_generator(seed or 0, index) if mode == "sample" else None
    capacity = policy.config.capacity
    if inst.n_boxes > capacity and not rolling:
        raise TapCapacityError(inst.n_boxes, capacity)
    if inst.container_count > 1:
        return solve_multi(inst, policy, strategy, mode, "net", generator=generator)[0]
    if inst.n_boxes > capacity:
        logger.info("Instance has %d boxes > capacity %d: rolling", inst.n_boxes, capacity)
        return rolling_solve(policy, inst, strategy, mode, generator)[0]
    return rollout(policy, inst, strategy, mode, generator)[0]


def _evaluate_one(item: Tuple[int, ProblemInstance], **kwargs: Any) -> Dict[str, Any]:
    index, inst = item
    start = time.perf_counter()
    solution = solve_instance(inst, index=index, **kwargs)
    elapsed = (time.perf_counter() - start) * 1000.0
    r = solution.reward
    return {
        "instance": index,
        "n_boxes": inst.n_boxes,
        "C": r.C,
        "P": r.P,
        "S": r.S,
        "R": r.R,
        "t_ms": elapsed,
    }


@timer
def evaluate(
    instances: Sequence[ProblemInstance],
    method: str = "greedy",
    model: Model = None,
    strategy: str = "lb",
    mode: str = "argmax",
    seed: Optional[int] = 0,
    rolling: bool = False,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Evaluate a method on every instance.

    Parameters
    ----------
    instances : sequence of ProblemInstance
    method : {'net', 'greedy', 'random', 'exhaustive'}
    model : PackingPolicy or path, optional
        Policy or checkpoint file for ``'net'``; a loaded checkpoint is only read
    strategy : {'lb', 'mul', 'macs'}
    mode : {'argmax', 'sample'}
    seed : int, optional
    rolling : bool
        Solve instances larger than the capacity with the rolling window
    workers : int
        Process pool size; results do not depend on it

    Returns
    -------
    pd.DataFrame
        Columns ``instance, n_boxes, C, P, S, R, t_ms``

    Raises
    ------
    TapCapacityError
        If a net instance exceeds the capacity and ``rolling`` is off

    Examples
    --------
    >>> df = evaluate(instances, method='greedy')
    >>> df['R'].mean()
    """
    if method not in METHODS:
        raise TapValueError(f"method must be one of {METHODS}, got '{method}'")
    if strategy not in STRATEGIES:
        raise TapValueError(f"placement must be one of {STRATEGIES}, got '{strategy}'")
    if mode not in ROLLOUT_MODES:
        raise TapValueError(f"mode must be one of {ROLLOUT_MODES}, got '{mode}'")
    policy = resolve_policy(model) if method == "net" else None
    if policy is not None and not rolling:
        too_large = [inst.n_boxes for inst in instances if inst.n_boxes > policy.config.capacity]
        if too_large:
            raise TapCapacityError(max(too_large), policy.config.capacity)

    func = partial(
        _evaluate_one,
        method=method,
        policy=policy,
        strategy=strategy,
        mode=mode,
        seed=seed,
        rolling=rolling,
    )
    rows = parallel_map(func, list(enumerate(instances)), workers)
    columns = ["instance", "n_boxes"] + METRIC_COLUMNS + ["t_ms"]
    return pd.DataFrame(rows, columns=columns)


def summarize(
    df: pd.DataFrame, method: str = "", placement: str = "", timing: bool = True
) -> pd.DataFrame:
    """
    One-row summary: mean ``C, P, S, R`` and mean time per instance.

    Examples
    --------
    >>> summarize(evaluate(instances), method='greedy', placement='lb')
    """
    row: Dict[str, Any] = {"method": method, "placement": placement, "count": len(df)}
    for column in METRIC_COLUMNS:
        row[column] = float(df[column].mean()) if len(df) else np.nan
    if timing:
        row["t_ms"] = float(df["t_ms"].mean()) if len(df) else np.nan
    return pd.DataFrame([row])
