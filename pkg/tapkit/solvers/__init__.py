"""
Solvers for tapkit.

- baselines: Random, Greedy and the exhaustive oracle for tiny instances
- rolling: priority window for piles larger than the network capacity
- multi: several target containers
"""

from .baselines import EXHAUSTIVE_LIMIT, greedy_step, solve_exhaustive, solve_greedy, solve_random
from .multi import solve_multi
from .rolling import RollingWindow, priority, rolling_solve

__all__ = [
    "EXHAUSTIVE_LIMIT",
    "solve_random",
    "solve_greedy",
    "greedy_step",
    "solve_exhaustive",
    "priority",
    "RollingWindow",
    "rolling_solve",
    "solve_multi",
]
