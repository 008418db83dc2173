"""
tapkit: Transport and Pack
==========================

Move a pile of boxes into target containers, one accessible box at a time,
so that the result is compact, pyramid-shaped and stable.

Basic usage:
    >>> from tapkit import GenConfig, generate_dataset, solve_greedy
    >>> inst = generate_dataset(GenConfig(seed=7, n=10))[0]
    >>> solution = solve_greedy(inst, strategy="lb")
    >>> solution.reward.R

Building blocks:
    extract_precedence() : Which boxes block which, from the top and the sides
    select_placement()   : Where a box lands (LB / MUL / MACS)
    reward()             : Compactness, pyramidality and stability of a packing
    generate_dataset()   : RAND and perfectly packable PPSG instances
    PackingPolicy        : Learned selection network
    train() / evaluate() : Policy-gradient training and metric tables
"""

__version__ = "0.1.0"
__license__ = "MIT"

# Domain types
from .core.geometry import BoxSpec, OrientedState, PlacedBox
from .core.instance import ProblemInstance, Solution, validate_instance

# Packing model
from .packing.container import ContainerState, compute_ems, represent
from .packing.placement import STRATEGIES, select_placement
from .packing.precedence import PrecedenceGraph, extract_precedence, valid_states
from .packing.reward import RewardBreakdown, is_stable, reward
from .packing.state import PackingState, initial_state, replay_solution

# Datasets
from .datasets.generators import GenConfig, gen_ppsg, gen_rand, generate_dataset

# Solvers
from .solvers.baselines import solve_exhaustive, solve_greedy, solve_random
from .solvers.multi import solve_multi
from .solvers.rolling import priority, rolling_solve

# Policy
from .policy.checkpoint import load_checkpoint, save_checkpoint
from .policy.network import PackingPolicy, PolicyConfig
from .policy.rollout import rollout

# Training
from .training.config import TrainConfig
from .training.evaluation import evaluate, summarize
from .training.trainer import train

# I/O operations
from .io.readers import (
    read_dataset,
    read_instance,
    read_solution,
    write_dataset,
    write_instance,
    write_solution,
)
from .io.render import render_svg

# Export public interface
__all__ = [
    # Version info
    "__version__",
    # Domain types
    "BoxSpec",
    "OrientedState",
    "PlacedBox",
    "ProblemInstance",
    "Solution",
    "validate_instance",
    # Packing model
    "PrecedenceGraph",
    "extract_precedence",
    "valid_states",
    "ContainerState",
    "compute_ems",
    "represent",
    "STRATEGIES",
    "select_placement",
    "RewardBreakdown",
    "reward",
    "is_stable",
    "PackingState",
    "initial_state",
    "replay_solution",
    # Datasets
    "GenConfig",
    "gen_rand",
    "gen_ppsg",
    "generate_dataset",
    # Solvers
    "solve_random",
    "solve_greedy",
    "solve_exhaustive",
    "priority",
    "rolling_solve",
    "solve_multi",
    # Policy
    "PolicyConfig",
    "PackingPolicy",
    "rollout",
    "save_checkpoint",
    "load_checkpoint",
    # Training
    "TrainConfig",
    "train",
    "evaluate",
    "summarize",
    # I/O operations
    "read_instance",
    "write_instance",
    "read_solution",
    "write_solution",
    "read_dataset",
    "write_dataset",
    "render_svg",
]
