"""
Tests for height maps, drops and empty maximal spaces.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tapkit.core.geometry import PlacedBox
from tapkit.exceptions import TapBoundsError, TapValueError
from tapkit.packing.container import (
    ContainerState,
    EmptyRect,
    HeightMap,
    compute_ems,
    drop,
    heightmap_from_boxes,
    place,
    represent,
    representation_size,
)


class TestHeightMap:
    """Test the skyline value type."""

    def test_negative(self):
        """Test error on negative heights."""
        with pytest.raises(TapValueError):
            HeightMap([1, -1])

    def test_read_only(self, pit_map):
        """Test that the heights cannot be mutated."""
        with pytest.raises(ValueError):
            pit_map.heights[0] = 5

    def test_properties(self):
        """Test shape-derived properties in 2D and 3D."""
        flat = HeightMap.empty(5)
        deep = HeightMap.empty(4, 3)
        assert (flat.dims_mode, flat.width, flat.depth) == (2, 5, 1)
        assert (deep.dims_mode, deep.width, deep.depth) == (3, 4, 3)

    def test_equality(self):
        """Test value equality."""
        assert HeightMap([1, 2]) == HeightMap(np.array([1, 2]))
        assert hash(HeightMap([1, 2])) == hash(HeightMap([1, 2]))


class TestDropAndPlace:
    """Test vertical drops."""

    def test_drop_on_step(self, pit_map):
        """Test that a box straddling the step rests on the higher column."""
        assert drop(pit_map, (2, 1), 1) == 2

    def test_drop_in_pit(self, pit_map):
        """Test that a box in the pit rests on the floor."""
        assert drop(pit_map, (3, 2), 2) == 0

    def test_place(self, pit_map):
        """Test the skyline after a drop."""
        assert place(pit_map, (2, 1), 2).tolist() == [2, 2, 1, 1, 0]
        assert place(pit_map, (2, 1), 1).tolist() == [2, 3, 3, 0, 0]

    def test_place_3d(self):
        """Test a drop onto a 3D skyline."""
        hm = place(HeightMap.empty(3, 3), (2, 1, 2), 0, 1)
        assert hm.tolist() == [[0, 1, 1], [0, 1, 1], [0, 0, 0]]
        assert drop(hm, (1, 1, 1), 1, 0) == 0
        assert drop(hm, (2, 1, 1), 1, 1) == 1

    def test_out_of_bounds(self, pit_map):
        """Test error when the footprint leaves the container."""
        with pytest.raises(TapBoundsError):
            drop(pit_map, (2, 1), 4)
        with pytest.raises(TapBoundsError):
            drop(pit_map, (1, 1), -1)

    def test_with_box(self, pit_state):
        """Test adding a resting box to a container state."""
        state = pit_state.with_box(PlacedBox(1, 0, (3, 1), 2, 0))
        assert state.heightmap.tolist() == [2, 2, 1, 1, 1]
        assert [b.box_id for b in state.placed] == [9, 1]

    def test_with_floating_box(self, pit_state):
        """Test error when a box does not rest on the skyline."""
        with pytest.raises(TapValueError, match="does not rest"):
            pit_state.with_box(PlacedBox(1, 0, (3, 1), 2, 1))

    def test_rebuild_from_boxes(self, pit_state):
        """Test rebuilding the skyline from placed boxes."""
        assert heightmap_from_boxes(pit_state.placed, 5) == pit_state.heightmap


class TestEMS:
    """Test empty maximal space enumeration."""

    def test_pit(self, pit_map):
        """Test the two spaces above a step."""
        assert compute_ems(pit_map, 4) == [EmptyRect(0, 2, 5, 2), EmptyRect(2, 0, 3, 4)]

    def test_valley(self):
        """Test a one-column valley below a low ceiling."""
        assert compute_ems(HeightMap([1, 0, 1]), 2) == [
            EmptyRect(0, 1, 3, 1),
            EmptyRect(1, 0, 1, 2),
        ]

    def test_empty_container(self):
        """Test that an empty container is one space."""
        assert compute_ems(HeightMap.empty(4), 3) == [EmptyRect(0, 0, 4, 3)]

    def test_full_to_ceiling(self):
        """Test that no space remains at the ceiling."""
        assert compute_ems(HeightMap([3, 3]), 3) == []

    def test_ceiling_below_skyline(self, pit_map):
        """Test error on a ceiling under the highest column."""
        with pytest.raises(TapValueError):
            compute_ems(pit_map, 1)

    def test_3d_step(self):
        """Test spaces above a 3D step."""
        hm = HeightMap([[1, 1], [0, 0]])
        rects = compute_ems(hm, 2)
        assert EmptyRect(0, 1, 2, 1, 0, 2) in rects
        assert EmptyRect(1, 0, 1, 2, 0, 2) in rects
        assert len(rects) == 2

    def test_spaces_are_empty(self, pit_map):
        """Test that every space lies above the skyline."""
        for rect in compute_ems(pit_map, 5):
            assert pit_map.heights[rect.x : rect.right].max() <= rect.y
            assert rect.top == 5


def _brute_force_ems(heights, ceiling):
    """Every empty box under ``ceiling`` that cannot grow one cell in any direction."""
    heights = np.asarray(heights)
    grid = heights.reshape(heights.shape[0], -1)
    width, depth = grid.shape
    free = np.arange(ceiling)[None, None, :] >= grid[:, :, None]

    def empty(x0, x1, z0, z1, y0, y1):
        if x0 < 0 or z0 < 0 or y0 < 0 or x1 > width or z1 > depth or y1 > ceiling:
            return False
        return bool(free[x0:x1, z0:z1, y0:y1].all())

    found = set()
    spans = itertools.product(
        range(width),
        range(1, width + 1),
        range(depth),
        range(1, depth + 1),
        range(ceiling),
        range(1, ceiling + 1),
    )
    for x0, x1, z0, z1, y0, y1 in spans:
        if x1 <= x0 or z1 <= z0 or y1 <= y0 or not empty(x0, x1, z0, z1, y0, y1):
            continue
        grown = [
            (x0 - 1, x1, z0, z1, y0, y1),
            (x0, x1 + 1, z0, z1, y0, y1),
            (x0, x1, z0 - 1, z1, y0, y1),
            (x0, x1, z0, z1 + 1, y0, y1),
            (x0, x1, z0, z1, y0 - 1, y1),
            (x0, x1, z0, z1, y0, y1 + 1),
        ]
        if not any(empty(*g) for g in grown):
            found.add((x0, y0, x1 - x0, y1 - y0, z0, z1 - z0))
    return found


def _as_tuples(rects):
    return {(r.x, r.y, r.w, r.h, r.z, r.d) for r in rects}


class TestEMSMatchesBruteForce:
    """Test EMS enumeration against exhaustive search over all empty boxes."""

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.integers(0, 6), min_size=1, max_size=8),
        st.integers(0, 2),
    )
    def test_2d(self, heights, headroom):
        """Test random skylines up to width 8."""
        ceiling = min(max(heights) + headroom, 8)
        hm = HeightMap(heights)
        assert _as_tuples(compute_ems(hm, ceiling)) == _brute_force_ems(heights, ceiling)

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 3).flatmap(
            lambda w: st.lists(
                st.lists(st.integers(0, 3), min_size=w, max_size=w), min_size=1, max_size=3
            )
        ),
        st.integers(0, 2),
    )
    def test_3d(self, rows, headroom):
        """Test random height grids up to 3x3."""
        heights = np.array(rows)
        ceiling = int(heights.max()) + headroom
        hm = HeightMap(heights)
        assert _as_tuples(compute_ems(hm, ceiling)) == _brute_force_ems(heights, ceiling)

    def test_pit_exhaustively(self):
        """Test every skyline of width 4 with heights up to 3."""
        for heights in itertools.product(range(4), repeat=4):
            ceiling = max(heights) + 1
            expected = _brute_force_ems(heights, ceiling)
            assert _as_tuples(compute_ems(HeightMap(list(heights)), ceiling)) == expected


class TestRepresent:
    """Test height map representations."""

    def test_modes(self):
        """Test the three 2D representations."""
        hm = HeightMap([1, 3, 3, 0, 2])
        assert represent(hm, "raw").tolist() == [1, 3, 3, 0, 2]
        assert represent(hm, "zero-min").tolist() == [1, 3, 3, 0, 2]
        assert represent(hm, "gradient").tolist() == [0, 2, 0, -3, 2]

    def test_zero_min_shift(self):
        """Test that zero-min subtracts the lowest column."""
        assert represent(HeightMap([2, 4, 3]), "zero-min").tolist() == [0, 2, 1]

    def test_gradient_3d(self):
        """Test that the 3D gradient stacks one grid per axis."""
        grad = represent(HeightMap([[0, 1], [2, 2]]), "gradient")
        assert grad.shape == (2, 2, 2)
        assert grad[0].tolist() == [[0, 0], [2, 1]]
        assert grad[1].tolist() == [[0, 1], [0, 0]]
        assert representation_size("gradient", 2, 2) == 8

    def test_unknown_mode(self, pit_map):
        """Test error on an unknown representation."""
        with pytest.raises(TapValueError):
            represent(pit_map, "log")


def test_empty_container_state():
    state = ContainerState.empty(2, 4, 3)
    assert state.index == 2
    assert state.dims_mode == 3
    assert state.placed == ()
