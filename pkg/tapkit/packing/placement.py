"""
Placement strategies: where a chosen oriented box goes inside its container.

- ``lb``   : bottom-left corner of each EMS, scored by packing reward
- ``mul``  : every bottom corner of each EMS, scored by packing reward
- ``macs`` : every bottom corner, scored by the largest empty convex region
             left after the placement
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.geometry import Dims, PlacedBox
from ..exceptions import TapInfeasiblePlacementError, TapValueError
from .container import ContainerState, EmptyRect, HeightMap, compute_ems, drop, place
from .reward import reward

STRATEGIES = ("lb", "mul", "macs")


@dataclass(frozen=True)
class PlacementCandidate:
    """A feasible drop position for an oriented box."""

    x: int
    y: int
    z: int = 0
    ems: Optional[EmptyRect] = None
    score: float = 0.0

    def sort_key(self) -> Tuple[float, int, int, int]:
        """Best first: higher score, then lower y, x, z."""
        return (-self.score, self.y, self.x, self.z)


def default_ceiling(hm: HeightMap, dims: Dims, remaining_max_dim: int = 0) -> int:
    """Evaluation ceiling that always admits the box and the largest remaining one."""
    return hm.max_height + max(dims[1], remaining_max_dim)


def _fits(hm: HeightMap, dims: Dims) -> bool:
    if dims[0] > hm.width:
        return False
    return hm.dims_mode == 2 or dims[2] <= hm.depth


def _candidates(
    state: ContainerState, dims: Dims, corners: str, ceiling: Optional[int]
) -> List[PlacementCandidate]:
    hm = state.heightmap
    if not _fits(hm, dims):
        raise TapInfeasiblePlacementError(dims, (hm.width, hm.depth))
    ceiling = ceiling if ceiling is not None else default_ceiling(hm, dims)
    w = dims[0]
    d = dims[2] if hm.dims_mode == 3 else 1

    seen: Dict[Tuple[int, int], PlacementCandidate] = {}
    for rect in compute_ems(hm, ceiling):
        if rect.w < w or rect.d < d or rect.h < dims[1]:
            continue
        xs = [rect.x] if corners == "lb" else [rect.x, rect.right - w]
        zs = [rect.z] if corners == "lb" or hm.dims_mode == 2 else [rect.z, rect.back - d]
        for x in xs:
            for z in zs:
                if (x, z) not in seen:
                    seen[(x, z)] = PlacementCandidate(x, drop(hm, dims, x, z), z, rect)
    if not seen:
        raise TapInfeasiblePlacementError(dims, (hm.width, hm.depth))
    return list(seen.values())


def candidates_lb(
    state: ContainerState, dims: Dims, ceiling: Optional[int] = None
) -> List[PlacementCandidate]:
    """
    One candidate per EMS wide enough for the box: its bottom-left corner.

    Examples
    --------
    >>> [(c.x, c.y) for c in candidates_lb(state_22000, (2, 1))]
    [(0, 2), (2, 0)]
    """
    return _candidates(state, dims, "lb", ceiling)


def candidates_mul(
    state: ContainerState, dims: Dims, ceiling: Optional[int] = None
) -> List[PlacementCandidate]:
    """Every bottom corner of every fitting EMS (2 per EMS in 2D, 4 in 3D), deduplicated."""
    return _candidates(state, dims, "mul", ceiling)


def accessible_convex_space(hm: HeightMap, ceiling: int) -> int:
    """
    Volume of the largest single EMS below ``ceiling``.

    Examples
    --------
    >>> accessible_convex_space(HeightMap([2, 2, 0, 0, 0]), 4)
    12
    """
    return max((rect.volume for rect in compute_ems(hm, ceiling)), default=0)


def _total_space(hm: HeightMap, ceiling: int) -> int:
    return sum(rect.volume for rect in compute_ems(hm, ceiling))


def _as_placed(
    candidate: PlacementCandidate, box_id: int, orientation: int, dims: Dims, container: int
) -> PlacedBox:
    return PlacedBox(box_id, orientation, dims, candidate.x, candidate.y, candidate.z, container)


def select_placement(
    strategy: str,
    state: ContainerState,
    dims: Dims,
    remaining_max_dim: int = 0,
    box_id: int = -1,
    orientation: int = 0,
) -> PlacementCandidate:
    """
    Pick the position of an oriented box in a container.

    Parameters
    ----------
    strategy : {'lb', 'mul', 'macs'}
    state : ContainerState
        Container the box is assigned to
    dims : tuple of int
        Oriented extents of the box
    remaining_max_dim : int
        Largest oriented extent among boxes still to pack; widens the EMS
        ceiling so MACS values space usable by future boxes

    Returns
    -------
    PlacementCandidate
        The best candidate, ties broken by lower y, then x, then z

    Raises
    ------
    TapInfeasiblePlacementError
        If the box does not fit the container
    """
    if strategy not in STRATEGIES:
        raise TapValueError(f"Unknown placement strategy '{strategy}'; expected {STRATEGIES}")
    hm = state.heightmap
    ceiling = default_ceiling(hm, dims, remaining_max_dim)
    if strategy == "lb":
        candidates = candidates_lb(state, dims, ceiling)
    else:
        candidates = candidates_mul(state, dims, ceiling)

    width, depth = hm.width, hm.depth
    scored = []
    for cand in candidates:
        if strategy == "macs":
            after = place(hm, dims, cand.x, cand.z)
            # Ceiling is shared by all candidates of one decision.
            after_ceiling = max(ceiling, after.max_height)
            score = float(accessible_convex_space(after, after_ceiling))
            tie = _total_space(after, after_ceiling)
        else:
            placed = state.placed + (_as_placed(cand, box_id, orientation, dims, state.index),)
            score = reward(placed, width, depth).R
            tie = 0
        scored.append((cand, score, tie))

    best, score, _ = min(scored, key=lambda item: (-item[1], -item[2], *item[0].sort_key()[1:]))
    return PlacementCandidate(best.x, best.y, best.z, best.ems, score)


def place_box(
    strategy: str,
    state: ContainerState,
    box_id: int,
    orientation: int,
    dims: Dims,
    remaining_max_dim: int = 0,
) -> Tuple[PlacedBox, ContainerState]:
    """Select a placement and apply it; returns the placed box and the new state."""
    cand = select_placement(strategy, state, dims, remaining_max_dim, box_id, orientation)
    placed = _as_placed(cand, box_id, orientation, dims, state.index)
    return placed, state.with_box(placed)


def remaining_max_dim(dims: Sequence[Dims]) -> int:
    """Largest extent among a collection of boxes (0 for none)."""
    return max((max(d) for d in dims), default=0)
