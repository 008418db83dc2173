"""
Packing reward: compactness, pyramidality and stability.

``R = (C + P + S) / 3`` where

- ``C = A_packed / A_rect``  (bounding rectangle up to the highest top)
- ``P = A_packed / A_proj``  (boxes projected down to the floor)
- ``S = N_stable / N_packed``

In 3D the areas become volumes. Multi-container rewards sum the raw
quantities over containers before forming the ratios.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from ..core.geometry import PlacedBox
from ..exceptions import TapInvalidStateError

_HULL_EPS = 1e-9


@dataclass(frozen=True)
class RewardBreakdown:
    """Reward components and the raw quantities they were computed from."""

    C: float
    P: float
    S: float
    R: float
    a_packed: int = 0
    a_rect: int = 0
    a_proj: int = 0
    n_stable: int = 0
    n_packed: int = 0
    vacuous: bool = False

    @classmethod
    def from_counts(
        cls, a_packed: int, a_rect: int, a_proj: int, n_stable: int, n_packed: int
    ) -> "RewardBreakdown":
        if n_packed == 0:
            return cls(1.0, 1.0, 1.0, 1.0, vacuous=True)
        c = a_packed / a_rect
        p = a_packed / a_proj
        s = n_stable / n_packed
        return cls(c, p, s, (c + p + s) / 3, a_packed, a_rect, a_proj, n_stable, n_packed)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


# ============================================================================
# Components
# ============================================================================


def _column_tops(placed: Sequence[PlacedBox], width: int, depth: int) -> np.ndarray:
    tops = np.zeros((width, depth), dtype=np.int64)
    for box in placed:
        window = (slice(box.x, box.right), slice(box.z, box.back))
        tops[window] = np.maximum(tops[window], box.top)
    return tops


def _counts(placed: Sequence[PlacedBox], width: int, depth: int = 1) -> Dict[str, int]:
    if not placed:
        return dict(a_packed=0, a_rect=0, a_proj=0, n_stable=0, n_packed=0)
    tops = _column_tops(placed, width, depth)
    return dict(
        a_packed=sum(box.volume for box in placed),
        a_rect=width * depth * int(tops.max()),
        a_proj=int(tops.sum()),
        n_stable=sum(is_stable(box, placed) for box in placed),
        n_packed=len(placed),
    )


def compactness(placed: Sequence[PlacedBox], width: int, depth: int = 1) -> float:
    """
    Packed area (volume) over the container area up to the highest top.

    Examples
    --------
    >>> compactness([PlacedBox(0, 0, (5, 1), 0, 0), PlacedBox(1, 0, (3, 2), 0, 1)], 5)
    0.7333333333333333
    """
    counts = _counts(placed, width, depth)
    if not counts["n_packed"]:
        return 1.0
    return counts["a_packed"] / counts["a_rect"]


def pyramidality(placed: Sequence[PlacedBox], width: int, depth: int = 1) -> float:
    """Packed area (volume) over the area of the boxes projected to the floor."""
    counts = _counts(placed, width, depth)
    if not counts["n_packed"]:
        return 1.0
    return counts["a_packed"] / counts["a_proj"]


def stability(placed: Sequence[PlacedBox]) -> float:
    """Fraction of boxes whose centre lies strictly inside their support region."""
    if not placed:
        return 1.0
    return sum(is_stable(box, placed) for box in placed) / len(placed)


# ============================================================================
# Stability test
# ============================================================================


def support_contacts(box: PlacedBox, below: Iterable[PlacedBox]) -> List[PlacedBox]:
    """
    Contact patches between ``box``'s bottom face and supporters' top faces.

    Each patch is returned as a flat PlacedBox (height 1) spanning the overlap.
    """
    patches = []
    for other in below:
        if other.box_id == box.box_id or other.top != box.y:
            continue
        if other.container_idx != box.container_idx or not box.footprint_overlaps(other):
            continue
        x_lo, x_hi = max(box.x, other.x), min(box.right, other.right)
        z_lo, z_hi = max(box.z, other.z), min(box.back, other.back)
        dims = (x_hi - x_lo, 1) if box.dims_mode == 2 else (x_hi - x_lo, 1, z_hi - z_lo)
        patches.append(PlacedBox(other.box_id, 0, dims, x_lo, box.y, z_lo, box.container_idx))
    return patches


def is_stable(box: PlacedBox, below: Iterable[PlacedBox]) -> bool:
    """
    Geometric stability of a box resting by gravity.

    Boxes on the floor are stable. Otherwise the box's centre must fall
    strictly inside the span (2D) or convex hull (3D) of its contact cells;
    a centre exactly on the boundary counts as unstable.

    Raises
    ------
    TapInvalidStateError
        If the box floats (``y > 0`` and no supporter touches it)
    """
    if box.y == 0:
        return True
    patches = support_contacts(box, below)
    if not patches:
        raise TapInvalidStateError(f"Box {box.box_id} floats at y={box.y}")

    center_x = box.x + box.width / 2
    if box.dims_mode == 2:
        lo = min(p.x for p in patches)
        hi = max(p.right for p in patches)
        return lo < center_x < hi

    center = np.array([center_x, box.z + box.depth / 2])
    corners = np.array(
        [
            (x, z)
            for p in patches
            for x in (p.x, p.right)
            for z in (p.z, p.back)
        ],
        dtype=np.float64,
    )
    hull = ConvexHull(corners)
    # Facet equations are outward normals with offset: inside means < 0.
    distances = hull.equations[:, :2] @ center + hull.equations[:, 2]
    return bool((distances < -_HULL_EPS).all())


# ============================================================================
# Aggregate
# ============================================================================


def reward(placed: Sequence[PlacedBox], width: int, depth: int = 1) -> RewardBreakdown:
    """
    Reward of one container's packing.

    Examples
    --------
    >>> round(reward([PlacedBox(0, 0, (5, 1), 0, 0), PlacedBox(1, 0, (3, 2), 0, 1)], 5).R, 4)
    0.9111
    """
    return RewardBreakdown.from_counts(**_counts(placed, width, depth))


def aggregate_reward(
    containers: Sequence[Sequence[PlacedBox]], width: int, depth: int = 1
) -> RewardBreakdown:
    """Reward over several containers: raw counts are summed before the ratios."""
    totals = dict(a_packed=0, a_rect=0, a_proj=0, n_stable=0, n_packed=0)
    for placed in containers:
        for key, value in _counts(placed, width, depth).items():
            totals[key] += value
    return RewardBreakdown.from_counts(**totals)


def reward_by_container(
    placed: Sequence[PlacedBox], width: int, depth: int = 1, count: Optional[int] = None
) -> List[RewardBreakdown]:
    """Split a flat placement list by container and score each part."""
    count = count if count is not None else 1 + max((p.container_idx for p in placed), default=0)
    groups: List[List[PlacedBox]] = [[] for _ in range(count)]
    for box in placed:
        groups[box.container_idx].append(box)
    return [reward(group, width, depth) for group in groups]
