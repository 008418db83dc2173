"""
Instance and solution data model.

A :class:`ProblemInstance` is the initial pile plus the description of the
target container(s); a :class:`Solution` is the ordered transport sequence
with its reward breakdown.
"""

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Tuple

from .geometry import BoxSpec, PlacedBox, apply_orientation, orientation_count

if TYPE_CHECKING:  # pragma: no cover
    from ..packing.reward import RewardBreakdown


@dataclass(frozen=True)
class ProblemInstance:
    """
    A transport-and-pack problem.

    Parameters
    ----------
    dims_mode : int
        2 or 3
    init_width, init_depth : int
        Extent of the initial container (depth is 1 in 2D)
    target_width, target_depth : int
        Extent of every target container (depth is 1 in 2D)
    container_count : int
        Number of target containers ``k``
    boxes : tuple of BoxSpec
    initial_placements : tuple of PlacedBox
        Where each box rests in the initial container
    meta : mapping
        Free-form provenance (generator, seed, index, ...)
    """

    dims_mode: int
    init_width: int
    target_width: int
    boxes: Tuple[BoxSpec, ...]
    initial_placements: Tuple[PlacedBox, ...]
    init_depth: int = 1
    target_depth: int = 1
    container_count: int = 1
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def n_boxes(self) -> int:
        return len(self.boxes)

    @property
    def box_ids(self) -> Tuple[int, ...]:
        return tuple(box.id for box in self.boxes)

    @property
    def n_orientations(self) -> int:
        return orientation_count(self.dims_mode)

    def box(self, box_id: int) -> BoxSpec:
        for box in self.boxes:
            if box.id == box_id:
                return box
        raise KeyError(box_id)

    def placement_of(self, box_id: int) -> PlacedBox:
        for placed in self.initial_placements:
            if placed.box_id == box_id:
                return placed
        raise KeyError(box_id)

    def target_extent(self) -> Tuple[int, ...]:
        if self.dims_mode == 2:
            return (self.target_width,)
        return (self.target_width, self.target_depth)

    def with_targets(
        self, assignment: Mapping[int, int], container_count: int
    ) -> "ProblemInstance":
        """Return a copy with boxes re-assigned to target containers."""
        boxes = tuple(replace(b, target_idx=assignment.get(b.id, b.target_idx)) for b in self.boxes)
        return replace(self, boxes=boxes, container_count=container_count)


@dataclass(frozen=True)
class Solution:
    """An ordered transport sequence and the reward of the final packing."""

    steps: Tuple[PlacedBox, ...]
    reward: Optional["RewardBreakdown"] = None
    container_rewards: Tuple["RewardBreakdown", ...] = ()
    method: str = ""
    meta: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def order(self) -> Tuple[int, ...]:
        return tuple(step.box_id for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


# ============================================================================
# Validation
# ============================================================================


def validate_instance(inst: ProblemInstance) -> List[str]:
    """
    Check every ProblemInstance invariant.

    Returns
    -------
    list of str
        One description per violation; empty when the instance is valid

    Examples
    --------
    >>> validate_instance(f1)
    []
    """
    violations: List[str] = []
    if inst.dims_mode not in (2, 3):
        return [f"dims_mode: {inst.dims_mode}"]
    if inst.container_count < 1:
        violations.append(f"container_count<1: {inst.container_count}")
    if inst.init_width < 1 or inst.target_width < 1:
        violations.append("width<1")
    if inst.init_depth < 1 or inst.target_depth < 1:
        violations.append("depth<1")

    seen = set()
    for box in inst.boxes:
        if box.id in seen:
            violations.append(f"duplicate id: {box.id}")
        seen.add(box.id)
        if len(box.dims) != inst.dims_mode:
            violations.append(f"dims arity: {box.id}")
            continue
        if any(extent < 1 for extent in box.dims):
            violations.append(f"extent<1: {box.id}")
        if not 0 <= box.target_idx < inst.container_count:
            violations.append(f"target_idx out of range: {box.id}")

    placed_ids: Dict[int, int] = {}
    for placed in inst.initial_placements:
        placed_ids[placed.box_id] = placed_ids.get(placed.box_id, 0) + 1
    for box_id, count in sorted(placed_ids.items()):
        if box_id not in seen:
            violations.append(f"unknown box: {box_id}")
        elif count > 1:
            violations.append(f"placed twice: {box_id}")
    for box_id in sorted(seen - set(placed_ids)):
        violations.append(f"not placed: {box_id}")

    valid_geometry = []
    for placed in inst.initial_placements:
        if placed.box_id not in seen or any(extent < 1 for extent in placed.dims):
            continue
        box = inst.box(placed.box_id)
        if len(placed.dims) != len(box.dims):
            continue
        if not 0 <= placed.orientation < inst.n_orientations or placed.dims != apply_orientation(
            box.dims, placed.orientation
        ):
            violations.append(f"dims mismatch: {placed.box_id}")
        if (
            placed.x < 0
            or placed.y < 0
            or placed.z < 0
            or placed.right > inst.init_width
            or placed.back > inst.init_depth
        ):
            violations.append(f"out of bounds: {placed.box_id}")
        valid_geometry.append(placed)

    for a, b in combinations(valid_geometry, 2):
        if a.overlaps(b):
            violations.append(f"overlap: {a.box_id},{b.box_id}")
    return violations
