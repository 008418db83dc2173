"""
Target container simulation.

A container is described by its height map: one column height per x (2D) or
per (x, z) cell (3D). Free space is everything above the skyline, so boxes
land by a vertical drop and every empty maximal space (EMS) reaches the
ceiling.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.geometry import Dims, PlacedBox
from ..exceptions import TapBoundsError, TapValueError

HEIGHT_MODES = ("raw", "zero-min", "gradient")


@dataclass(frozen=True)
class HeightMap:
    """
    Skyline of a container.

    Parameters
    ----------
    heights : ndarray of int
        Shape ``(W,)`` in 2D or ``(W, D)`` in 3D
    """

    heights: np.ndarray

    def __post_init__(self) -> None:
        heights = np.array(self.heights, dtype=np.int64)
        if heights.ndim not in (1, 2):
            raise TapValueError(f"Height map must be 1D or 2D, got shape {heights.shape}")
        if (heights < 0).any():
            raise TapValueError("Height map entries must be >= 0")
        heights.setflags(write=False)
        object.__setattr__(self, "heights", heights)

    @classmethod
    def empty(cls, width: int, depth: Optional[int] = None) -> "HeightMap":
        shape = (width,) if depth is None else (width, depth)
        return cls(np.zeros(shape, dtype=np.int64))

    @property
    def dims_mode(self) -> int:
        return self.heights.ndim + 1

    @property
    def width(self) -> int:
        return int(self.heights.shape[0])

    @property
    def depth(self) -> int:
        return int(self.heights.shape[1]) if self.heights.ndim == 2 else 1

    @property
    def max_height(self) -> int:
        return int(self.heights.max()) if self.heights.size else 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeightMap):
            return NotImplemented
        return np.array_equal(self.heights, other.heights)

    def __hash__(self) -> int:
        return hash(self.heights.tobytes())

    def tolist(self) -> list:
        return self.heights.tolist()


@dataclass(frozen=True)
class EmptyRect:
    """A maximal empty box above the skyline; ``(x, y, z)`` is its min corner."""

    x: int
    y: int
    w: int
    h: int
    z: int = 0
    d: int = 1

    @property
    def volume(self) -> int:
        return self.w * self.h * self.d

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def back(self) -> int:
        return self.z + self.d

    @property
    def top(self) -> int:
        return self.y + self.h


@dataclass(frozen=True)
class ContainerState:
    """One target container: its height map and the boxes placed so far."""

    index: int
    heightmap: HeightMap
    placed: Tuple[PlacedBox, ...] = field(default_factory=tuple)

    @classmethod
    def empty(cls, index: int, width: int, depth: Optional[int] = None) -> "ContainerState":
        return cls(index, HeightMap.empty(width, depth))

    @property
    def dims_mode(self) -> int:
        return self.heightmap.dims_mode

    def with_box(self, box: PlacedBox) -> "ContainerState":
        """Return the state after placing ``box`` at its own position."""
        resting = drop(self.heightmap, box.dims, box.x, box.z)
        if resting != box.y:
            raise TapValueError(
                f"Box {box.box_id} at y={box.y} does not rest on the skyline (y={resting})"
            )
        return ContainerState(
            self.index, place(self.heightmap, box.dims, box.x, box.z), self.placed + (box,)
        )


# ============================================================================
# Drop and place
# ============================================================================


def _footprint(hm: HeightMap, dims: Dims, x: int, z: int) -> Tuple[slice, ...]:
    w = dims[0]
    if x < 0 or x + w > hm.width:
        raise TapBoundsError((x, x + w), (hm.width, hm.depth))
    if hm.dims_mode == 2:
        return (slice(x, x + w),)
    d = dims[2]
    if z < 0 or z + d > hm.depth:
        raise TapBoundsError((x, x + w, z, z + d), (hm.width, hm.depth))
    return (slice(x, x + w), slice(z, z + d))


def drop(hm: HeightMap, dims: Dims, x: int, z: int = 0) -> int:
    """
    Resting height of a box dropped with its min corner at ``x`` (and ``z``).

    Examples
    --------
    >>> drop(HeightMap([2, 2, 0, 0, 0]), (2, 1), 1)
    2
    """
    return int(hm.heights[_footprint(hm, dims, x, z)].max())


def place(hm: HeightMap, dims: Dims, x: int, z: int = 0) -> HeightMap:
    """
    Return the height map after dropping a box at ``x`` (and ``z``).

    Examples
    --------
    >>> place(HeightMap([2, 2, 0, 0, 0]), (2, 1), 2).tolist()
    [2, 2, 1, 1, 0]
    """
    window = _footprint(hm, dims, x, z)
    heights = hm.heights.copy()
    heights[window] = int(heights[window].max()) + dims[1]
    return HeightMap(heights)


# ============================================================================
# Empty maximal spaces
# ============================================================================


def compute_ems(hm: HeightMap, ceiling: int) -> List[EmptyRect]:
    """
    Enumerate every maximal empty rectangle (2D) or cuboid (3D) below ``ceiling``.

    Free space above a skyline is closed upwards, so each maximal region is a
    footprint ``F`` with bottom ``max(hm[F])`` and top ``ceiling``; it is
    maximal iff growing ``F`` by one column on any side hits a wall or a
    higher column.

    Raises
    ------
    TapValueError
        If ``ceiling`` is below the highest column

    Examples
    --------
    >>> [(r.x, r.w, r.y, r.h) for r in compute_ems(HeightMap([2, 2, 0, 0, 0]), 4)]
    [(0, 5, 2, 2), (2, 3, 0, 4)]
    """
    if ceiling < hm.max_height:
        raise TapValueError(f"Ceiling {ceiling} below max height {hm.max_height}")
    if hm.dims_mode == 2:
        rects = _ems_2d(hm.heights, ceiling)
    else:
        rects = _ems_3d(hm.heights, ceiling)
    return sorted(rects, key=lambda r: (r.x, r.z, r.y, r.w, r.d))


def _ems_2d(heights: np.ndarray, ceiling: int) -> List[EmptyRect]:
    width = len(heights)
    rects = []
    for lo in range(width):
        bottom = -1
        for hi in range(lo + 1, width + 1):
            bottom = max(bottom, int(heights[hi - 1]))
            if bottom >= ceiling:
                break
            left_closed = lo == 0 or heights[lo - 1] > bottom
            right_closed = hi == width or heights[hi] > bottom
            if left_closed and right_closed:
                rects.append(EmptyRect(x=lo, y=bottom, w=hi - lo, h=ceiling - bottom))
    return rects


def _ems_3d(heights: np.ndarray, ceiling: int) -> List[EmptyRect]:
    width, depth = heights.shape
    rects = []
    for x0 in range(width):
        column_max = np.full(depth, -1, dtype=np.int64)
        for x1 in range(x0 + 1, width + 1):
            column_max = np.maximum(column_max, heights[x1 - 1])
            for z0 in range(depth):
                bottom = -1
                for z1 in range(z0 + 1, depth + 1):
                    bottom = max(bottom, int(column_max[z1 - 1]))
                    if bottom >= ceiling:
                        break
                    if _closed_3d(heights, x0, x1, z0, z1, bottom):
                        rects.append(
                            EmptyRect(
                                x=x0, y=bottom, z=z0, w=x1 - x0, h=ceiling - bottom, d=z1 - z0
                            )
                        )
    return rects


def _closed_3d(heights: np.ndarray, x0: int, x1: int, z0: int, z1: int, bottom: int) -> bool:
    width, depth = heights.shape
    if x0 > 0 and heights[x0 - 1, z0:z1].max() <= bottom:
        return False
    if x1 < width and heights[x1, z0:z1].max() <= bottom:
        return False
    if z0 > 0 and heights[x0:x1, z0 - 1].max() <= bottom:
        return False
    if z1 < depth and heights[x0:x1, z1].max() <= bottom:
        return False
    return True


# ============================================================================
# Representations fed to the policy
# ============================================================================


def represent(hm: HeightMap, mode: str = "gradient") -> np.ndarray:
    """
    Convert a height map into one of the policy's input representations.

    Parameters
    ----------
    mode : {'raw', 'zero-min', 'gradient'}
        ``raw`` keeps heights, ``zero-min`` subtracts the minimum and
        ``gradient`` keeps only neighbour differences (first entry 0). In 3D
        the gradient is two stacked grids, one per horizontal axis.

    Examples
    --------
    >>> represent(HeightMap([1, 3, 3, 0, 2]), "gradient").tolist()
    [0.0, 2.0, 0.0, -3.0, 2.0]
    """
    heights = hm.heights.astype(np.float64)
    if mode == "raw":
        return heights
    if mode == "zero-min":
        return heights - heights.min()
    if mode == "gradient":
        if heights.ndim == 1:
            grad = np.zeros_like(heights)
            grad[1:] = np.diff(heights)
            return grad
        grad_x = np.zeros_like(heights)
        grad_x[1:, :] = np.diff(heights, axis=0)
        grad_z = np.zeros_like(heights)
        grad_z[:, 1:] = np.diff(heights, axis=1)
        return np.stack([grad_x, grad_z])
    raise TapValueError(f"Unknown height map mode '{mode}'; expected one of {HEIGHT_MODES}")


def representation_size(mode: str, width: int, depth: Optional[int] = None) -> int:
    """Flattened length of :func:`represent` output."""
    if depth is None:
        return width
    return width * depth * (2 if mode == "gradient" else 1)


def heightmap_from_boxes(
    placed: Sequence[PlacedBox], width: int, depth: Optional[int] = None
) -> HeightMap:
    """Rebuild a skyline from placed boxes (max top per column)."""
    heights = np.zeros((width,) if depth is None else (width, depth), dtype=np.int64)
    for box in placed:
        if depth is None:
            window = (slice(box.x, box.right),)
        else:
            window = (slice(box.x, box.right), slice(box.z, box.back))
        heights[window] = np.maximum(heights[window], box.top)
    return HeightMap(heights)
