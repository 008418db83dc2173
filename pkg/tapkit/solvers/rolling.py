"""
Rolling-window solving for piles larger than the network capacity.

The window holds at most ``capacity`` boxes, chosen by priority: fewest
boxes left on top first, then boxes that can already be rotated, then the
lowest id. A packed box keeps its slot until a replacement arrives, and the
replacement takes exactly that slot, so with ``capacity >= n_boxes`` the
window never changes and the rollout equals the plain one.
"""

import logging
from typing import List, Optional, Tuple

import torch

from ..core.instance import ProblemInstance, Solution
from ..packing.precedence import PrecedenceGraph
from ..packing.state import PackingState, initial_state
from ..policy.network import PackingPolicy
from ..policy.rollout import RolloutTrace, SlotAssignment, rollout

logger = logging.getLogger(__name__)


def priority(inst: ProblemInstance, graph: PrecedenceGraph, box_id: int) -> Tuple[int, bool]:
    """
    Window priority of an unpacked box.

    Returns
    -------
    removal_count : int
        Boxes still on top of it
    side_accessible : bool
        Whether its left or right access set is already empty

    Examples
    --------
    >>> [priority(f1, extract_precedence(f1), b) for b in (0, 1, 2)]
    [(0, False), (1, False), (0, False)]
    """
    return len(graph.live_tb(box_id)), graph.side_accessible(box_id)


def _rank(inst: ProblemInstance, graph: PrecedenceGraph, box_id: int) -> Tuple[int, bool, int]:
    removal, side = priority(inst, graph, box_id)
    return removal, not side, box_id


class RollingWindow(SlotAssignment):
    """Priority-filled slot window over the unpacked boxes."""

    def __init__(self, state: PackingState, capacity: int):
        self.capacity = capacity
        graph = state.graph
        ranked = sorted(state.unpacked, key=lambda b: _rank(state.instance, graph, b))
        members = set(ranked[:capacity])
        self._slots: List[Optional[int]] = [b for b in state.instance.box_ids if b in members]
        self.refills = 0

    @property
    def members(self) -> Tuple[Optional[int], ...]:
        return tuple(self._slots)

    def slots(self, state: PackingState) -> Tuple[Optional[int], ...]:
        return tuple(self._slots)

    def after_pack(self, state: PackingState, box_id: int) -> None:
        """Give the packed box's slot to the best unpacked box outside the window."""
        outside = [b for b in state.unpacked if b not in self._slots]
        if not outside:
            return
        best = min(outside, key=lambda b: _rank(state.instance, state.graph, b))
        self._slots[self._slots.index(box_id)] = best
        self.refills += 1


def rolling_solve(
    policy: PackingPolicy,
    inst: ProblemInstance,
    strategy: str = "lb",
    mode: str = "argmax",
    generator: Optional[torch.Generator] = None,
) -> Tuple[Solution, RolloutTrace]:
    """
    Solve an instance of any size with a fixed-capacity policy.

    Each step the policy only sees the boxes in the window; a window box
    still blocked by a box outside the window stays unselectable until that
    blocker has been packed.
    """
    window = RollingWindow(initial_state(inst), policy.config.capacity)
    solution, trace = rollout(policy, inst, strategy, mode, generator, window, method="rolling")
    logger.debug(
        "Rolling solve of %d boxes with capacity %d: %d refills",
        inst.n_boxes,
        policy.config.capacity,
        window.refills,
    )
    return solution, trace
