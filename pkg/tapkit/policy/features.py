"""
Network inputs built from a packing state.

States are laid out slot-major: state ``slot * n_orient + o`` is the box in
``slot`` under orientation ``o``. Empty slots and packed boxes produce zero
features and are neither valid nor live.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch

from ..core.geometry import apply_orientation
from ..core.instance import ProblemInstance
from ..exceptions import TapValueError
from ..packing.container import represent
from ..packing.precedence import encode_dynamic
from ..packing.state import PackingState
from .network import PolicyConfig

Slots = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class Observation:
    """Network inputs for one instance at one step."""

    slots: Slots
    static: np.ndarray
    dynamic: np.ndarray
    heights: np.ndarray
    valid: np.ndarray
    live: np.ndarray

    def decode_state(self, index: int, n_orient: int) -> Tuple[int, int]:
        """Map a state index back to ``(box_id, orientation)``."""
        slot, orientation = divmod(int(index), n_orient)
        box_id = self.slots[slot]
        if box_id is None:
            raise TapValueError(f"State {index} points at an empty slot")
        return box_id, orientation


def check_compatible(inst: ProblemInstance, cfg: PolicyConfig) -> None:
    """Raise if the instance geometry does not match the network's inputs."""
    problems = []
    if inst.dims_mode != cfg.dims_mode:
        problems.append(f"dims_mode {inst.dims_mode} != {cfg.dims_mode}")
    if inst.target_width != cfg.target_width:
        problems.append(f"target_width {inst.target_width} != {cfg.target_width}")
    if inst.dims_mode == 3 and inst.target_depth != cfg.target_depth:
        problems.append(f"target_depth {inst.target_depth} != {cfg.target_depth}")
    if inst.container_count != cfg.container_count:
        problems.append(f"container_count {inst.container_count} != {cfg.container_count}")
    if problems:
        raise TapValueError("Instance does not match the policy: " + "; ".join(problems))


def static_features(inst: ProblemInstance, slots: Slots, cfg: PolicyConfig) -> np.ndarray:
    """
    Oriented extents over the target width, plus the container one-hot when k > 1.

    Returns
    -------
    ndarray (capacity * n_orient, static_features)
    """
    features = np.zeros((cfg.n_states, cfg.static_features), dtype=np.float32)
    for slot, box_id in enumerate(slots):
        if box_id is None:
            continue
        box = inst.box(box_id)
        for o in range(cfg.n_orient):
            row = slot * cfg.n_orient + o
            oriented = np.array(apply_orientation(box.dims, o), dtype=np.float32)
            features[row, : cfg.dims_mode] = oriented / cfg.target_width
            if cfg.container_count > 1:
                features[row, cfg.dims_mode + box.target_idx] = 1.0
    return features


def fits_mask(inst: ProblemInstance, slots: Slots, cfg: PolicyConfig) -> np.ndarray:
    """States whose oriented footprint fits inside a target container."""
    fits = np.zeros(cfg.n_states, dtype=bool)
    for slot, box_id in enumerate(slots):
        if box_id is None:
            continue
        for o in range(cfg.n_orient):
            dims = apply_orientation(inst.box(box_id).dims, o)
            ok = dims[0] <= inst.target_width
            if inst.dims_mode == 3:
                ok = ok and dims[2] <= inst.target_depth
            fits[slot * cfg.n_orient + o] = ok
    return fits


def height_features(state: PackingState, cfg: PolicyConfig) -> np.ndarray:
    """One flattened height map representation per container, divided by the target width."""
    rows = [
        represent(c.heightmap, cfg.height_mode).ravel() / cfg.target_width
        for c in state.containers
    ]
    return np.stack(rows).astype(np.float32)


def observe(
    state: PackingState,
    cfg: PolicyConfig,
    slots: Optional[Sequence[Optional[int]]] = None,
    initial_dynamic: Optional[np.ndarray] = None,
) -> Observation:
    """
    Build the network inputs for ``state``.

    Parameters
    ----------
    slots : sequence, optional
        Box id per slot; defaults to every box in instance order
    initial_dynamic : ndarray, optional
        Masks recorded at the first step, used when ``cfg.dynamic_mode`` is
        ``'initial'``

    Raises
    ------
    TapCapacityError
        If more boxes than slots need encoding
    """
    enc = encode_dynamic(state.graph, cfg.capacity, slots)
    if cfg.dynamic_mode == "full":
        dynamic = enc.stacked().astype(np.float32)
    elif cfg.dynamic_mode == "initial":
        stacked = enc.stacked().astype(np.float32)
        dynamic = stacked if initial_dynamic is None else initial_dynamic
    else:
        dynamic = np.zeros((cfg.n_states, cfg.dynamic_features), dtype=np.float32)
    return Observation(
        slots=enc.slots,
        static=static_features(state.instance, enc.slots, cfg),
        dynamic=dynamic,
        heights=height_features(state, cfg),
        valid=enc.valid & fits_mask(state.instance, enc.slots, cfg),
        live=enc.live,
    )


def placeholder(cfg: PolicyConfig) -> Observation:
    """Inputs for a finished batch row: a single selectable dummy state."""
    valid = np.zeros(cfg.n_states, dtype=bool)
    valid[0] = True
    return Observation(
        slots=(None,) * cfg.capacity,
        static=np.zeros((cfg.n_states, cfg.static_features), dtype=np.float32),
        dynamic=np.zeros((cfg.n_states, cfg.dynamic_features), dtype=np.float32),
        heights=np.zeros((cfg.container_count, cfg.height_features), dtype=np.float32),
        valid=valid,
        live=valid.copy(),
    )


def collate(
    observations: List[Observation], dtype: torch.dtype = torch.float32
) -> Tuple[torch.Tensor, ...]:
    """Stack observations into ``(static, dynamic, heights, valid, live)`` tensors."""
    static = torch.as_tensor(np.stack([o.static for o in observations]), dtype=dtype)
    dynamic = torch.as_tensor(np.stack([o.dynamic for o in observations]), dtype=dtype)
    heights = torch.as_tensor(np.stack([o.heights for o in observations]), dtype=dtype)
    valid = torch.as_tensor(np.stack([o.valid for o in observations]))
    live = torch.as_tensor(np.stack([o.live for o in observations]))
    return static, dynamic, heights, valid, live
