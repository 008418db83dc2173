"""
Baseline sequence generators over the precedence graph.

Each solver picks the next oriented box among the currently valid states
and hands it to a placement strategy:

- ``solve_random``     : uniform choice
- ``solve_greedy``     : the state whose placement yields the best partial reward
- ``solve_exhaustive`` : every order, for tiny instances only
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..core.geometry import OrientedState
from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapInfeasiblePlacementError, TapValueError
from ..packing.state import PackingState, initial_state

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 5


def _try_apply(
    state: PackingState, chosen: OrientedState, strategy: str
) -> Optional[PackingState]:
    try:
        return state.apply(chosen, strategy)
    except TapInfeasiblePlacementError:
        return None


def solve_random(
    inst: ProblemInstance,
    strategy: str = "lb",
    rng: Optional[np.random.Generator] = None,
) -> Solution:
    """
    Pack by picking a uniformly random valid state at every step.

    A state whose oriented box fits nowhere is discarded and another one is
    drawn.

    Parameters
    ----------
    inst : ProblemInstance
    strategy : {'lb', 'mul', 'macs'}
    rng : numpy.random.Generator, optional
        Source of randomness; a fresh unseeded generator when omitted

    Raises
    ------
    TapInfeasiblePlacementError
        If no valid state can be placed
    """
    rng = rng if rng is not None else np.random.default_rng()
    state = initial_state(inst)
    while not state.is_done:
        candidates = state.valid_states()
        nxt = None
        while candidates and nxt is None:
            chosen = candidates.pop(int(rng.integers(len(candidates))))
            nxt = _try_apply(state, chosen, strategy)
        if nxt is None:
            raise TapInfeasiblePlacementError((), inst.target_extent())
        state = nxt
    return state.to_solution("random", strategy=strategy)


def greedy_step(state: PackingState, strategy: str = "lb") -> PackingState:
    """
    Commit the valid state with the highest partial reward.

    Ties go to the lowest box id, then the lowest orientation.
    """
    best: Optional[Tuple[float, PackingState]] = None
    for chosen in state.valid_states():
        nxt = _try_apply(state, chosen, strategy)
        if nxt is None:
            continue
        score = nxt.reward().R
        if best is None or score > best[0]:
            best = (score, nxt)
    if best is None:
        raise TapInfeasiblePlacementError((), state.instance.target_extent())
    return best[1]


def solve_greedy(inst: ProblemInstance, strategy: str = "lb") -> Solution:
    """
    Pack by committing, at every step, the state with the best partial reward.

    Examples
    --------
    >>> solve_greedy(f1).order
    (0, 2, 1)
    """
    state = initial_state(inst)
    while not state.is_done:
        state = greedy_step(state, strategy)
    return state.to_solution("greedy", strategy=strategy)


def solve_exhaustive(
    inst: ProblemInstance, strategy: str = "lb", limit: int = EXHAUSTIVE_LIMIT
) -> Solution:
    """
    Best reward over every feasible sequence of oriented states.

    Only meant as an oracle for tiny instances: the search tree grows as
    ``n! * orientations**n``.

    Raises
    ------
    TapValueError
        If the instance has more than ``limit`` boxes
    """
    if inst.n_boxes > limit:
        raise TapValueError(
            f"Exhaustive search is limited to {limit} boxes, instance has {inst.n_boxes}"
        )

    best: List[Optional[PackingState]] = [None]
    best_score = [-1.0]
    visited = [0]

    def _search(state: PackingState) -> None:
        if state.is_done:
            visited[0] += 1
            score = state.reward().R
            if score > best_score[0]:
                best_score[0] = score
                best[0] = state
            return
        for chosen in state.valid_states():
            nxt = _try_apply(state, chosen, strategy)
            if nxt is not None:
                _search(nxt)

    _search(initial_state(inst))
    if best[0] is None:
        raise TapInfeasiblePlacementError((), inst.target_extent())
    logger.debug("Exhaustive search visited %d complete sequences", visited[0])
    return best[0].to_solution("exhaustive", strategy=strategy, leaves=visited[0])
