"""
tapkit core data model.

This module provides the value types shared by every other module:
- BoxSpec / OrientedState / PlacedBox: boxes, their states and placements
- ProblemInstance / Solution: problems and transport sequences
"""

from .geometry import (
    ORIENTATIONS_2D,
    ORIENTATIONS_3D,
    BoxSpec,
    OrientedState,
    PlacedBox,
    apply_orientation,
    invert_orientation,
    needs_side_access,
    orientation_count,
    orientation_table,
    overlap_interval,
)
from .instance import ProblemInstance, Solution, validate_instance

__all__ = [
    "ORIENTATIONS_2D",
    "ORIENTATIONS_3D",
    "BoxSpec",
    "OrientedState",
    "PlacedBox",
    "ProblemInstance",
    "Solution",
    "apply_orientation",
    "invert_orientation",
    "needs_side_access",
    "orientation_count",
    "orientation_table",
    "overlap_interval",
    "validate_instance",
]
