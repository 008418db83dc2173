"""
Packing simulation for tapkit.

- precedence: TB / LAB / RAB blocker graph of the initial pile
- container: height maps, drop semantics and empty maximal spaces
- reward: compactness, pyramidality and stability
- placement: LB, MUL and MACS position selection
- state: immutable episode state and solution replay
"""

from .container import (
    HEIGHT_MODES,
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
from .placement import (
    STRATEGIES,
    PlacementCandidate,
    accessible_convex_space,
    candidates_lb,
    candidates_mul,
    place_box,
    select_placement,
)
from .precedence import (
    DynamicEncoding,
    PrecedenceGraph,
    box_valid_orientations,
    encode_dynamic,
    extract_precedence,
    remove_box,
    valid_states,
)
from .reward import (
    RewardBreakdown,
    aggregate_reward,
    compactness,
    is_stable,
    pyramidality,
    reward,
    reward_by_container,
    stability,
)
from .state import PackingState, initial_state, pack_sequence, replay_solution

__all__ = [
    # Precedence
    "PrecedenceGraph",
    "DynamicEncoding",
    "extract_precedence",
    "valid_states",
    "box_valid_orientations",
    "remove_box",
    "encode_dynamic",
    # Container
    "HEIGHT_MODES",
    "HeightMap",
    "EmptyRect",
    "ContainerState",
    "drop",
    "place",
    "compute_ems",
    "represent",
    "representation_size",
    "heightmap_from_boxes",
    # Reward
    "RewardBreakdown",
    "compactness",
    "pyramidality",
    "stability",
    "is_stable",
    "reward",
    "aggregate_reward",
    "reward_by_container",
    # Placement
    "STRATEGIES",
    "PlacementCandidate",
    "candidates_lb",
    "candidates_mul",
    "accessible_convex_space",
    "select_placement",
    "place_box",
    # State
    "PackingState",
    "initial_state",
    "pack_sequence",
    "replay_solution",
]
