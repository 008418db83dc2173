"""
Packing state: the precedence graph and every target container, advanced one
transported box at a time.

A :class:`PackingState` is immutable. :meth:`PackingState.apply` returns the
state after one box has been lifted from the pile and dropped into its
target container.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from ..core.geometry import OrientedState, PlacedBox, apply_orientation, needs_side_access
from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapFeasibilityError, TapValidationError
from .container import ContainerState, drop
from .placement import place_box
from .precedence import (
    PrecedenceGraph,
    box_valid_orientations,
    extract_precedence,
    remove_box,
    valid_states,
)
from .reward import RewardBreakdown, aggregate_reward, reward


@dataclass(frozen=True)
class PackingState:
    """Snapshot of a transport-and-pack episode."""

    instance: ProblemInstance
    graph: PrecedenceGraph
    containers: Tuple[ContainerState, ...]
    steps: Tuple[PlacedBox, ...] = field(default_factory=tuple)

    @property
    def is_done(self) -> bool:
        return self.graph.is_empty()

    @property
    def unpacked(self) -> Tuple[int, ...]:
        return self.graph.unpacked

    def valid_states(self) -> List[OrientedState]:
        return valid_states(self.graph)

    def container_for(self, box_id: int) -> ContainerState:
        return self.containers[self.instance.box(box_id).target_idx]

    def remaining_max_dim(self, excluding: Optional[int] = None) -> int:
        """Largest extent among unpacked boxes, optionally ignoring one of them."""
        return max(
            (max(self.graph.dims[b]) for b in self.unpacked if b != excluding),
            default=0,
        )

    def apply(self, chosen: OrientedState, strategy: str = "lb") -> "PackingState":
        """
        Transport one oriented box and place it with ``strategy``.

        Raises
        ------
        TapFeasibilityError
            If the state is not currently transportable
        TapInfeasiblePlacementError
            If the oriented box does not fit its container
        """
        if chosen.orientation not in _valid_orientations(self.graph, chosen.box_id):
            raise TapFeasibilityError(
                f"State ({chosen.box_id}, {chosen.orientation}) is not transportable now"
            )
        dims = apply_orientation(self.graph.dims[chosen.box_id], chosen.orientation)
        container = self.container_for(chosen.box_id)
        placed, updated = place_box(
            strategy,
            container,
            chosen.box_id,
            chosen.orientation,
            dims,
            self.remaining_max_dim(excluding=chosen.box_id),
        )
        return self._advance(placed, updated)

    def apply_placed(self, placed: PlacedBox) -> "PackingState":
        """Transport one box to an explicit position (used for replays and witnesses)."""
        container = self.containers[placed.container_idx]
        return self._advance(placed, container.with_box(placed))

    def _advance(self, placed: PlacedBox, updated: ContainerState) -> "PackingState":
        containers = list(self.containers)
        containers[updated.index] = updated
        return PackingState(
            self.instance,
            remove_box(self.graph, placed.box_id),
            tuple(containers),
            self.steps + (placed,),
        )

    def reward(self) -> RewardBreakdown:
        """Aggregate reward over all containers."""
        depth = self.instance.target_depth if self.instance.dims_mode == 3 else 1
        return aggregate_reward(
            [c.placed for c in self.containers], self.instance.target_width, depth
        )

    def container_rewards(self) -> Tuple[RewardBreakdown, ...]:
        depth = self.instance.target_depth if self.instance.dims_mode == 3 else 1
        return tuple(
            reward(c.placed, self.instance.target_width, depth) for c in self.containers
        )

    def to_solution(self, method: str = "", **meta) -> Solution:
        return Solution(
            steps=self.steps,
            reward=self.reward(),
            container_rewards=self.container_rewards(),
            method=method,
            meta=dict(meta),
        )


def _valid_orientations(g: PrecedenceGraph, box_id: int) -> List[int]:
    if box_id not in g.dims:
        raise TapFeasibilityError(f"Unknown box {box_id}")
    return box_valid_orientations(g, box_id)


def initial_state(inst: ProblemInstance) -> PackingState:
    """
    Start an episode: extract the precedence graph and open empty containers.

    Raises
    ------
    TapValidationError
        If the instance is invalid
    """
    graph = extract_precedence(inst)
    depth = inst.target_depth if inst.dims_mode == 3 else None
    containers = tuple(
        ContainerState.empty(k, inst.target_width, depth) for k in range(inst.container_count)
    )
    return PackingState(inst, graph, containers)


def pack_sequence(
    inst: ProblemInstance, states: Sequence[OrientedState], strategy: str = "lb"
) -> PackingState:
    """Apply a full sequence of oriented states from the initial state."""
    state = initial_state(inst)
    for chosen in states:
        state = state.apply(chosen, strategy)
    return state


# ============================================================================
# Replay validation
# ============================================================================


def replay_solution(inst: ProblemInstance, solution: Solution) -> List[str]:
    """
    Re-execute a solution against the instance and list every violation.

    Checks, per step: the box exists and is still in the pile, it is free
    from the top, its orientation is reachable (side access when needed),
    its extents match the orientation, it lands in its assigned container,
    stays within bounds and rests on the skyline. Finally every box must have
    been transported.

    Returns
    -------
    list of str
        Empty when the solution is valid
    """
    violations: List[str] = []
    try:
        state = initial_state(inst)
    except TapValidationError as e:
        return [f"invalid instance: {e}"]

    known = set(inst.box_ids)
    for t, step in enumerate(solution.steps):
        prefix = f"step {t} (box {step.box_id})"
        if step.box_id not in known:
            violations.append(f"{prefix}: unknown box")
            continue
        if step.box_id in state.graph.packed:
            violations.append(f"{prefix}: already packed")
            continue
        if not state.graph.top_accessible(step.box_id):
            violations.append(f"{prefix}: blocked from the top")
            continue
        if not 0 <= step.orientation < inst.n_orientations:
            violations.append(f"{prefix}: orientation out of range")
            continue
        side_ok = state.graph.side_accessible(step.box_id)
        if needs_side_access(inst.dims_mode, step.orientation) and not side_ok:
            violations.append(f"{prefix}: rotation without side access")
            continue
        if step.dims != apply_orientation(inst.box(step.box_id).dims, step.orientation):
            violations.append(f"{prefix}: dims mismatch")
            continue
        if step.container_idx != inst.box(step.box_id).target_idx:
            violations.append(f"{prefix}: wrong container")
            continue
        container = state.containers[step.container_idx]
        try:
            resting = drop(container.heightmap, step.dims, step.x, step.z)
        except IndexError:
            violations.append(f"{prefix}: out of bounds")
            continue
        if resting != step.y:
            violations.append(
                f"{prefix}: does not rest on the skyline (y={step.y}, drop={resting})"
            )
            continue
        state = state.apply_placed(step)

    for box_id in state.unpacked:
        violations.append(f"box {box_id}: never transported")
    return violations
