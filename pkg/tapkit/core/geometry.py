"""
Integer-grid geometry for tapkit.

All extents are half-open ``[lo, hi)`` on the unit grid. The vertical axis is
``y`` and gravity points towards ``-y``. Coordinates and extents are always
ordered ``(x, y[, z])`` to line up with box dimensions ``(w, h[, d])``.
"""

from dataclasses import dataclass, field
from typing import Tuple

from ..exceptions import TapValueError

Dims = Tuple[int, ...]


# ============================================================================
# Orientation tables
# ============================================================================

# Each entry permutes the box's own (w, h[, d]) into the oriented extents.
ORIENTATIONS_2D: Tuple[Tuple[int, ...], ...] = ((0, 1), (1, 0))

# 0 identity, 1 quarter turn about the vertical axis: both keep the height
# vertical and need top access only. 2-5 lay the box on another face and need
# a free side for the gripper.
ORIENTATIONS_3D: Tuple[Tuple[int, ...], ...] = (
    (0, 1, 2),
    (2, 1, 0),
    (1, 0, 2),
    (1, 2, 0),
    (0, 2, 1),
    (2, 0, 1),
)

TOP_ACCESS_STATES = {2: frozenset({0}), 3: frozenset({0, 1})}


def orientation_table(dims_mode: int) -> Tuple[Tuple[int, ...], ...]:
    """Return the orientation permutations for a 2D or 3D problem."""
    if dims_mode == 2:
        return ORIENTATIONS_2D
    if dims_mode == 3:
        return ORIENTATIONS_3D
    raise TapValueError(f"dims_mode must be 2 or 3, got {dims_mode}")


def orientation_count(dims_mode: int) -> int:
    """Number of oriented states per box (2 in 2D, 6 in 3D)."""
    return len(orientation_table(dims_mode))


def needs_side_access(dims_mode: int, orientation: int) -> bool:
    """Whether an orientation requires the gripper to attach to a side face."""
    return orientation not in TOP_ACCESS_STATES[dims_mode]


def apply_orientation(dims: Dims, orientation: int) -> Dims:
    """
    Return the extents of ``dims`` under ``orientation``.

    Parameters
    ----------
    dims : tuple of int
        ``(w, h)`` or ``(w, h, d)``
    orientation : int
        Index into the orientation table of the matching dimensionality

    Examples
    --------
    >>> apply_orientation((2, 3), 1)
    (3, 2)
    >>> apply_orientation((1, 2, 3), 1)
    (3, 2, 1)
    """
    table = orientation_table(len(dims))
    if not 0 <= orientation < len(table):
        raise TapValueError(f"orientation {orientation} out of range for {len(dims)}D")
    return tuple(dims[axis] for axis in table[orientation])


def invert_orientation(oriented: Dims, orientation: int) -> Dims:
    """Undo :func:`apply_orientation`, recovering the box's own extents."""
    perm = orientation_table(len(oriented))[orientation]
    original = [0] * len(oriented)
    for slot, axis in enumerate(perm):
        original[axis] = oriented[slot]
    return tuple(original)


def overlap_interval(a_lo: int, a_hi: int, b_lo: int, b_hi: int) -> bool:
    """
    Test whether two half-open integer intervals share a unit cell.

    Raises
    ------
    TapValueError
        If either interval is degenerate (``lo >= hi``)

    Examples
    --------
    >>> overlap_interval(0, 2, 2, 4)
    False
    >>> overlap_interval(0, 3, 2, 4)
    True
    """
    if a_lo >= a_hi or b_lo >= b_hi:
        raise TapValueError(f"Degenerate interval in [{a_lo},{a_hi}) / [{b_lo},{b_hi})")
    return a_lo < b_hi and b_lo < a_hi


# ============================================================================
# Value types
# ============================================================================


@dataclass(frozen=True)
class BoxSpec:
    """
    A box as it lies in the initial pile.

    ``dims`` are the extents of the box in its initial pose, so orientation 0
    always means "as found". ``target_idx`` selects the target container.
    """

    id: int
    dims: Dims
    target_idx: int = 0

    @property
    def dims_mode(self) -> int:
        return len(self.dims)

    @property
    def volume(self) -> int:
        result = 1
        for extent in self.dims:
            result *= extent
        return result

    def oriented(self, orientation: int) -> "OrientedState":
        return OrientedState(self.id, orientation, apply_orientation(self.dims, orientation))


@dataclass(frozen=True, order=True)
class OrientedState:
    """One selectable state: a box under one of its orientations."""

    box_id: int
    orientation: int
    oriented_dims: Dims = field(compare=False)


@dataclass(frozen=True)
class PlacedBox:
    """
    A box resting in a container.

    ``dims`` are the oriented extents, ``(x, y[, z])`` the min corner.
    """

    box_id: int
    orientation: int
    dims: Dims
    x: int
    y: int
    z: int = 0
    container_idx: int = 0

    @property
    def dims_mode(self) -> int:
        return len(self.dims)

    @property
    def width(self) -> int:
        return self.dims[0]

    @property
    def height(self) -> int:
        return self.dims[1]

    @property
    def depth(self) -> int:
        return self.dims[2] if len(self.dims) == 3 else 1

    @property
    def top(self) -> int:
        return self.y + self.dims[1]

    @property
    def right(self) -> int:
        return self.x + self.dims[0]

    @property
    def back(self) -> int:
        return self.z + self.depth

    @property
    def volume(self) -> int:
        return self.width * self.height * self.depth

    def footprint_overlaps(self, other: "PlacedBox") -> bool:
        """Whether the downward projections of two boxes share a cell."""
        if not overlap_interval(self.x, self.right, other.x, other.right):
            return False
        return overlap_interval(self.z, self.back, other.z, other.back)

    def overlaps(self, other: "PlacedBox") -> bool:
        """Whether two boxes share a cell (same container assumed)."""
        return self.footprint_overlaps(other) and overlap_interval(
            self.y, self.top, other.y, other.top
        )

    def occupies_column(self, x: int, y_from: int, z_lo: int = 0, z_hi: int = 1) -> bool:
        """Whether the box fills a cell of column ``x`` at height >= ``y_from`` within z-range."""
        if not self.x <= x < self.right or self.top <= y_from:
            return False
        return overlap_interval(self.z, self.back, z_lo, z_hi)
