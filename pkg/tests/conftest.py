"""
Shared fixtures for the tapkit test suite.
"""

import pytest
import torch

from tapkit.core.geometry import BoxSpec, PlacedBox
from tapkit.core.instance import ProblemInstance
from tapkit.datasets.generators import GenConfig
from tapkit.packing.container import ContainerState, HeightMap
from tapkit.policy.network import PackingPolicy, PolicyConfig

A, B, C = 0, 1, 2


def make_instance(
    placements, init_width, target_width=None, dims_mode=2, targets=None, **kwargs
):
    """Build an instance whose boxes are exactly the given pile placements."""
    targets = targets or {}
    boxes = tuple(BoxSpec(p.box_id, p.dims, targets.get(p.box_id, 0)) for p in placements)
    return ProblemInstance(
        dims_mode=dims_mode,
        init_width=init_width,
        target_width=target_width if target_width is not None else init_width,
        boxes=boxes,
        initial_placements=tuple(placements),
        **kwargs,
    )


@pytest.fixture
def f1():
    """A 2x2 at (0,0), B 2x1 at (2,0), C 2x2 at (2,1); width 4."""
    return make_instance(
        [
            PlacedBox(A, 0, (2, 2), 0, 0),
            PlacedBox(B, 0, (2, 1), 2, 0),
            PlacedBox(C, 0, (2, 2), 2, 1),
        ],
        init_width=4,
    )


@pytest.fixture
def pit_map():
    """Height map [2, 2, 0, 0, 0]."""
    return HeightMap([2, 2, 0, 0, 0])


@pytest.fixture
def pit_state(pit_map):
    """Container of width 5 holding one 2x2 box at x=0."""
    return ContainerState(0, pit_map, (PlacedBox(9, 0, (2, 2), 0, 0),))


@pytest.fixture
def small_rand_cfg():
    return GenConfig(seed=3, n=6, count=8, init_width=7, target_width=5)


@pytest.fixture
def small_policy_cfg():
    return PolicyConfig(
        capacity=6,
        target_width=5,
        static_dim=8,
        dynamic_dim=8,
        height_dim=8,
        critic_dim=8,
    )


@pytest.fixture
def small_policy(small_policy_cfg):
    torch.manual_seed(0)
    return PackingPolicy(small_policy_cfg)
