"""
Multi-container solving.

Every box carries the index of its target container. The policy sees one
height map per container and each selected box is placed in its own
container; the reward sums the raw areas over containers before forming the
ratios.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import torch

from ..core.instance import ProblemInstance, Solution, validate_instance
from ..exceptions import TapValidationError, TapValueError
from ..policy.network import PackingPolicy
from ..policy.rollout import RolloutTrace, rollout
from .baselines import solve_greedy, solve_random
from .rolling import rolling_solve

logger = logging.getLogger(__name__)


def _check_assignment(inst: ProblemInstance) -> None:
    violations = [v for v in validate_instance(inst) if v.startswith("target_idx")]
    if violations:
        raise TapValidationError(violations, "solve_multi")


def solve_multi(
    inst: ProblemInstance,
    policy: Optional[PackingPolicy] = None,
    strategy: str = "lb",
    mode: str = "argmax",
    method: str = "net",
    rng: Optional[np.random.Generator] = None,
    generator: Optional[torch.Generator] = None,
) -> Tuple[Solution, Optional[RolloutTrace]]:
    """
    Pack an instance into its ``container_count`` target containers.

    Parameters
    ----------
    inst : ProblemInstance
        ``container_count >= 2``
    policy : PackingPolicy, optional
        Required for ``method='net'``; its ``container_count`` must match
    method : {'net', 'greedy', 'random'}

    Returns
    -------
    solution : Solution
        ``container_rewards`` holds one breakdown per container
    trace : RolloutTrace or None
        Only for the network method

    Raises
    ------
    TapValidationError
        If a box has no valid target container
    TapValueError
        If the instance has a single container or no policy is given for ``'net'``
    """
    if inst.container_count < 2:
        raise TapValueError(
            f"solve_multi needs at least 2 containers, instance has {inst.container_count}"
        )
    _check_assignment(inst)
    if method == "greedy":
        return solve_greedy(inst, strategy), None
    if method == "random":
        return solve_random(inst, strategy, rng), None
    if method != "net":
        raise TapValueError(f"Unknown method '{method}'")
    if policy is None:
        raise TapValueError("method='net' needs a policy")
    if inst.n_boxes > policy.config.capacity:
        logger.info(
            "Instance has %d boxes > capacity %d: rolling",
            inst.n_boxes,
            policy.config.capacity,
        )
        return rolling_solve(policy, inst, strategy, mode, generator)
    return rollout(policy, inst, strategy, mode, generator, method="multi")
