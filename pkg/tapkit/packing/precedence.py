"""
Precedence graph extraction and maintenance.

For every box ``O`` the graph keeps three blocker sets:

- ``tb``  : boxes in O's upward shadow (O cannot move until they are gone)
- ``lab`` : boxes in the column left of O from its bottom upward (self = wall)
- ``rab`` : boxes in the column right of O from its bottom upward (self = wall)

In 3D the side columns are the slabs adjacent to O's two x faces. The graph is
extracted once from the initial pile and then shrinks as boxes are packed.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.geometry import (
    Dims,
    OrientedState,
    apply_orientation,
    needs_side_access,
    orientation_count,
)
from ..core.instance import ProblemInstance, validate_instance
from ..exceptions import TapCapacityError, TapFeasibilityError, TapValidationError

Blockers = Mapping[int, FrozenSet[int]]


@dataclass(frozen=True)
class PrecedenceGraph:
    """
    Immutable precedence graph; :func:`remove_box` returns a new graph.

    Attributes
    ----------
    box_ids : tuple of int
        Node order (instance order)
    dims : mapping of box id to its extents in the initial pile
    tb, lab, rab : mapping of box id to frozenset of blocker ids
    packed : frozenset of box ids already transported
    """

    dims_mode: int
    box_ids: Tuple[int, ...]
    dims: Mapping[int, Dims]
    tb: Blockers
    lab: Blockers
    rab: Blockers
    packed: FrozenSet[int] = field(default_factory=frozenset)

    @property
    def unpacked(self) -> Tuple[int, ...]:
        return tuple(b for b in self.box_ids if b not in self.packed)

    def is_empty(self) -> bool:
        return len(self.packed) == len(self.box_ids)

    def live_tb(self, box_id: int) -> FrozenSet[int]:
        return self.tb[box_id] - self.packed

    def live_lab(self, box_id: int) -> FrozenSet[int]:
        return self.lab[box_id] - self.packed

    def live_rab(self, box_id: int) -> FrozenSet[int]:
        return self.rab[box_id] - self.packed

    def top_accessible(self, box_id: int) -> bool:
        return box_id not in self.packed and not self.live_tb(box_id)

    def side_accessible(self, box_id: int) -> bool:
        return not self.live_lab(box_id) or not self.live_rab(box_id)

    def to_dot(self) -> str:
        """Dump the live edges as a DOT digraph (blocker -> blocked)."""
        lines = ["digraph precedence {"]
        for box_id in self.unpacked:
            lines.append(f"  {box_id};")
        for kind, sets, style in (
            ("TB", self.tb, "solid"),
            ("LAB", self.lab, "dashed"),
            ("RAB", self.rab, "dotted"),
        ):
            for box_id in self.unpacked:
                for blocker in sorted(sets[box_id] - self.packed):
                    lines.append(
                        f'  {blocker} -> {box_id} [label="{kind}", style={style}];'
                    )
        lines.append("}")
        return "\n".join(lines)


# ============================================================================
# Extraction
# ============================================================================


def extract_precedence(inst: ProblemInstance) -> PrecedenceGraph:
    """
    Build the precedence graph of an initial pile.

    Raises
    ------
    TapValidationError
        If the instance is invalid

    Examples
    --------
    >>> g = extract_precedence(f1)
    >>> sorted(g.tb[1])
    [2]
    """
    violations = validate_instance(inst)
    if violations:
        raise TapValidationError(violations, "extract_precedence")

    placements = {p.box_id: p for p in inst.initial_placements}
    tb: Dict[int, FrozenSet[int]] = {}
    lab: Dict[int, FrozenSet[int]] = {}
    rab: Dict[int, FrozenSet[int]] = {}

    for box_id in inst.box_ids:
        o = placements[box_id]
        others = [p for p in inst.initial_placements if p.box_id != box_id]

        tb[box_id] = frozenset(
            r.box_id for r in others if r.y >= o.top and r.footprint_overlaps(o)
        )

        left = {r.box_id for r in others if r.occupies_column(o.x - 1, o.y, o.z, o.back)}
        if o.x == 0:
            left.add(box_id)
        right = {r.box_id for r in others if r.occupies_column(o.right, o.y, o.z, o.back)}
        if o.right == inst.init_width:
            right.add(box_id)

        # One open side already allows rotation: the other side's edges are dropped.
        if not left:
            right = set()
        elif not right:
            left = set()
        lab[box_id] = frozenset(left)
        rab[box_id] = frozenset(right)

    return PrecedenceGraph(
        dims_mode=inst.dims_mode,
        box_ids=inst.box_ids,
        dims={b.id: b.dims for b in inst.boxes},
        tb=tb,
        lab=lab,
        rab=rab,
    )


# ============================================================================
# Queries and updates
# ============================================================================


def box_valid_orientations(g: PrecedenceGraph, box_id: int) -> List[int]:
    """Orientations of ``box_id`` that can be transported right now."""
    if not g.top_accessible(box_id):
        return []
    side = g.side_accessible(box_id)
    return [
        o
        for o in range(orientation_count(g.dims_mode))
        if side or not needs_side_access(g.dims_mode, o)
    ]


def valid_states(g: PrecedenceGraph) -> List[OrientedState]:
    """
    All currently transportable oriented states, sorted by (box id, orientation).

    A state without rotation needs an empty live TB set; a state that needs
    the gripper on a side additionally needs the live LAB or live RAB set to
    be empty.
    """
    states = []
    for box_id in g.unpacked:
        for o in box_valid_orientations(g, box_id):
            states.append(OrientedState(box_id, o, apply_orientation(g.dims[box_id], o)))
    return sorted(states)


def remove_box(g: PrecedenceGraph, box_id: int) -> PrecedenceGraph:
    """
    Mark ``box_id`` as packed and delete it from every blocker set.

    Self-loops of other boxes are untouched (a box never blocks itself
    through another box's removal).

    Raises
    ------
    TapFeasibilityError
        If the box is already packed or still blocked from the top
    """
    if box_id not in g.dims:
        raise TapFeasibilityError(f"Unknown box {box_id}")
    if box_id in g.packed:
        raise TapFeasibilityError(f"Box {box_id} is already packed")
    if g.live_tb(box_id):
        raise TapFeasibilityError(
            f"Box {box_id} is blocked from the top by {sorted(g.live_tb(box_id))}"
        )

    def _drop(sets: Blockers) -> Dict[int, FrozenSet[int]]:
        return {
            owner: (blockers - {box_id}) if owner != box_id else blockers
            for owner, blockers in sets.items()
        }

    return PrecedenceGraph(
        dims_mode=g.dims_mode,
        box_ids=g.box_ids,
        dims=g.dims,
        tb=_drop(g.tb),
        lab=_drop(g.lab),
        rab=_drop(g.rab),
        packed=g.packed | {box_id},
    )


# ============================================================================
# Dynamic encoding
# ============================================================================


@dataclass(frozen=True)
class DynamicEncoding:
    """
    Binary blocker masks per oriented state.

    Attributes
    ----------
    slots : tuple
        Box id held by each slot (``None`` for dummy padding)
    tb, lab, rab : ndarray of uint8, shape (capacity * n_orient, capacity)
        Bit ``j`` of a state is set iff the box in slot ``j`` currently blocks it
    valid : ndarray of bool, shape (capacity * n_orient,)
        States that may be selected now
    live : ndarray of bool, shape (capacity * n_orient,)
        States of real, unpacked boxes
    """

    slots: Tuple[Optional[int], ...]
    n_orient: int
    tb: np.ndarray
    lab: np.ndarray
    rab: np.ndarray
    valid: np.ndarray
    live: np.ndarray

    @property
    def capacity(self) -> int:
        return len(self.slots)

    def state_index(self, slot: int, orientation: int) -> int:
        return slot * self.n_orient + orientation

    def as_int(self, kind: str, state: int) -> int:
        """Read one mask row as an integer with bit j = slot j."""
        row = getattr(self, kind)[state]
        return int(sum(int(bit) << j for j, bit in enumerate(row)))

    def stacked(self) -> np.ndarray:
        """Masks concatenated per state: shape (states, 3 * capacity)."""
        return np.concatenate([self.tb, self.lab, self.rab], axis=1)


def encode_dynamic(
    g: PrecedenceGraph, capacity: int, slots: Optional[Sequence[Optional[int]]] = None
) -> DynamicEncoding:
    """
    Encode the live blocker sets as fixed-width binary masks.

    Parameters
    ----------
    g : PrecedenceGraph
    capacity : int
        Network capacity ``n``; masks are exactly ``n`` bits wide
    slots : sequence, optional
        Box id per slot. Defaults to all boxes in graph order when they fit,
        otherwise to the unpacked boxes in graph order.

    Raises
    ------
    TapCapacityError
        If more than ``capacity`` boxes would need a slot
    """
    if slots is None:
        chosen: List[Optional[int]] = list(g.box_ids)
        if len(chosen) > capacity:
            chosen = list(g.unpacked)
        if len(chosen) > capacity:
            raise TapCapacityError(len(chosen), capacity)
        chosen += [None] * (capacity - len(chosen))
    else:
        chosen = list(slots)
        if len(chosen) > capacity:
            raise TapCapacityError(len(chosen), capacity)
        chosen += [None] * (capacity - len(chosen))

    n_orient = orientation_count(g.dims_mode)
    n_states = capacity * n_orient
    masks = {kind: np.zeros((n_states, capacity), dtype=np.uint8) for kind in ("tb", "lab", "rab")}
    valid = np.zeros(n_states, dtype=bool)
    live = np.zeros(n_states, dtype=bool)
    slot_of = {box_id: j for j, box_id in enumerate(chosen) if box_id is not None}

    for j, box_id in enumerate(chosen):
        if box_id is None or box_id in g.packed:
            continue
        rows = slice(j * n_orient, (j + 1) * n_orient)
        live[rows] = True
        for kind, sets in (("tb", g.tb), ("lab", g.lab), ("rab", g.rab)):
            for blocker in sets[box_id] - g.packed:
                if blocker in slot_of:
                    masks[kind][rows, slot_of[blocker]] = 1
        for o in box_valid_orientations(g, box_id):
            valid[j * n_orient + o] = True

    return DynamicEncoding(
        slots=tuple(chosen),
        n_orient=n_orient,
        tb=masks["tb"],
        lab=masks["lab"],
        rab=masks["rab"],
        valid=valid,
        live=live,
    )
