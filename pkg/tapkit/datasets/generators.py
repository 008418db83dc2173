"""
Instance generators.

- RAND : box extents drawn from a rounded, clamped Gaussian and piled up at
         random in the initial container
- PPSG : a perfectly packed target arrangement is cut by random guillotine
         splits, taken apart top-first and piled up, so every instance has a
         known solution with reward 1

Every instance owns a generator derived from ``(seed, index)``.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..core.geometry import (
    BoxSpec,
    Dims,
    PlacedBox,
    apply_orientation,
    needs_side_access,
    orientation_count,
    orientation_table,
)
from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapGenerationError, TapValueError
from ..packing.container import HeightMap, drop, place
from ..packing.state import initial_state, replay_solution
from ..utils.helpers import derive_rng, parallel_map, timer

logger = logging.getLogger(__name__)

MODES = ("rand", "ppsg")


# ============================================================================
# Configuration
# ============================================================================


@dataclass(frozen=True)
class GenConfig:
    """
    Dataset generation settings.

    Parameters
    ----------
    seed : int
        Master seed; instance ``i`` uses a generator derived from ``(seed, i)``
    n : int
        Boxes per instance
    count : int
        Number of instances
    mode : {'rand', 'ppsg'}
    dims_mode : {2, 3}
    init_width, init_depth : int
        Initial container footprint (depth only used in 3D)
    target_width, target_depth : int
        Target container footprint (depth only used in 3D)
    mean, sd, min_size, max_size : float, float, int, int
        Rounded Gaussian for each box extent, clamped to ``[min_size, max_size]``
    classical : bool
        Lay the boxes side by side on the floor with one free column between
        neighbours, removing every precedence constraint
    container_count : int
        Number of target containers; boxes are assigned uniformly (RAND) or
        in near-equal groups, one perfect packing each (PPSG)
    max_retries : int
        PPSG attempts before giving up
    rotate_attempts : int
        Draws allowed for a rotated PPSG pile position before falling back
        to an unrotated one
    """

    seed: int = 0
    n: int = 10
    count: int = 1
    mode: str = "rand"
    dims_mode: int = 2
    init_width: int = 7
    target_width: int = 5
    init_depth: int = 7
    target_depth: int = 5
    mean: float = 3.0
    sd: float = 1.5
    min_size: int = 1
    max_size: int = 5
    classical: bool = False
    container_count: int = 1
    max_retries: int = 100
    rotate_attempts: int = 50

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise TapValueError(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.dims_mode not in (2, 3):
            raise TapValueError(f"dims_mode must be 2 or 3, got {self.dims_mode}")
        if self.n < 1:
            raise TapValueError(f"n must be >= 1, got {self.n}")
        if self.count < 0:
            raise TapValueError(f"count must be >= 0, got {self.count}")
        if self.min_size < 1 or self.max_size < self.min_size:
            raise TapValueError(
                f"Need 1 <= min_size <= max_size, got [{self.min_size}, {self.max_size}]"
            )
        if self.sd <= 0:
            raise TapValueError(f"sd must be > 0, got {self.sd}")
        if self.container_count < 1:
            raise TapValueError(f"container_count must be >= 1, got {self.container_count}")
        if self.mode == "ppsg" and self.n < self.container_count:
            raise TapValueError("PPSG needs at least one box per container")
        footprints = [self.init_width, self.target_width]
        if self.dims_mode == 3:
            footprints += [self.init_depth, self.target_depth]
        if self.mode == "rand" and min(footprints) < self.max_size:
            raise TapValueError(
                f"Container footprint {min(footprints)} is smaller than max_size {self.max_size}"
            )
        if self.mode == "ppsg" and (
            self.init_width < self.target_width
            or (self.dims_mode == 3 and self.init_depth < self.target_depth)
        ):
            raise TapValueError("PPSG needs an initial container at least as large as the target")
        if min(footprints) < 1 or self.max_retries < 1 or self.rotate_attempts < 1:
            raise TapValueError("Widths, depths and retry counts must be >= 1")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def target_area(self) -> int:
        """Floor cells of one target container."""
        return self.target_width * (self.target_depth if self.dims_mode == 3 else 1)


# ============================================================================
# Size distribution
# ============================================================================


def size_pmf(cfg: GenConfig) -> np.ndarray:
    """
    Probability of each extent ``min_size..max_size`` under the rounded, clamped Gaussian.

    The tails beyond the clamp bounds are folded into the end values.
    """
    values = np.arange(cfg.min_size, cfg.max_size + 1, dtype=np.float64)
    upper = norm.cdf(values + 0.5, loc=cfg.mean, scale=cfg.sd)
    lower = norm.cdf(values - 0.5, loc=cfg.mean, scale=cfg.sd)
    upper[-1] = 1.0
    lower[0] = 0.0
    return upper - lower


def expected_box_size(cfg: GenConfig) -> float:
    """
    Expected box area (2D) or volume (3D); extents are independent.

    Examples
    --------
    >>> round(expected_box_size(GenConfig()), 3)
    9.0
    """
    values = np.arange(cfg.min_size, cfg.max_size + 1, dtype=np.float64)
    mean_extent = float(size_pmf(cfg) @ values)
    return mean_extent**cfg.dims_mode


def sample_dims(cfg: GenConfig, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` boxes; returns an int array of shape ``(count, dims_mode)``."""
    raw = rng.normal(cfg.mean, cfg.sd, size=(count, cfg.dims_mode))
    return np.clip(np.rint(raw), cfg.min_size, cfg.max_size).astype(np.int64)


# ============================================================================
# Piling up
# ============================================================================


def _side_open(hm: HeightMap, dims: Dims, x: int, y: int, z: int) -> bool:
    """Whether a side column next to the box is empty from ``y`` upward."""
    heights = hm.heights if hm.dims_mode == 3 else hm.heights[:, None]
    depth = dims[2] if hm.dims_mode == 3 else 1
    rows = slice(z, z + depth)
    left = x > 0 and int(heights[x - 1, rows].max()) <= y
    right = x + dims[0] < hm.width and int(heights[x + dims[0], rows].max()) <= y
    return left or right


def _fits(dims: Dims, width: int, depth: Optional[int]) -> bool:
    return dims[0] <= width and (depth is None or dims[2] <= depth)


def _drop_position(
    hm: HeightMap, dims: Dims, rng: np.random.Generator
) -> Tuple[int, int, int]:
    x = int(rng.integers(0, hm.width - dims[0] + 1))
    z = int(rng.integers(0, hm.depth - dims[2] + 1)) if hm.dims_mode == 3 else 0
    return x, drop(hm, dims, x, z), z


def pile_up(
    extents: Sequence[Dims],
    box_ids: Sequence[int],
    width: int,
    depth: Optional[int],
    rng: np.random.Generator,
    side_check: bool = False,
    attempts: int = 1,
) -> List[PlacedBox]:
    """
    Drop boxes one after another into the initial container.

    Each box gets a random orientation and a uniformly random position. With
    ``side_check`` a rotated box is only accepted where one of its side
    columns is empty from its bottom upward; after ``attempts`` rejected
    draws the box is dropped unrotated.

    Returns
    -------
    list of PlacedBox
        In drop order; ``orientation`` records the turn applied to the input
        extents and ``dims`` the resulting pile extents
    """
    hm = HeightMap.empty(width, depth)
    dims_mode = len(extents[0]) if extents else 2
    n_orient = orientation_count(dims_mode)
    placed = []
    for box_id, dims in zip(box_ids, extents):
        chosen = None
        for _ in range(attempts):
            o = int(rng.integers(n_orient))
            oriented = apply_orientation(tuple(dims), o)
            if not _fits(oriented, width, depth):
                continue
            x, y, z = _drop_position(hm, oriented, rng)
            if side_check and needs_side_access(dims_mode, o) and not _side_open(
                hm, oriented, x, y, z
            ):
                continue
            chosen = (o, oriented, x, y, z)
            break
        if chosen is None:
            logger.debug("Box %s dropped unrotated after %d draws", box_id, attempts)
            oriented = tuple(dims)
            chosen = (0, oriented, *_drop_position(hm, oriented, rng))
        o, oriented, x, y, z = chosen
        placed.append(PlacedBox(int(box_id), o, oriented, x, y, z))
        hm = place(hm, oriented, x, z)
    return placed


def lay_out_flat(
    extents: Sequence[Dims], box_ids: Sequence[int], rng: np.random.Generator
) -> Tuple[List[PlacedBox], int, int]:
    """
    Place boxes on the floor in a row, each followed by one free column.

    Returns the placements and the resulting container width and depth.
    """
    dims_mode = len(extents[0]) if extents else 2
    n_orient = orientation_count(dims_mode)
    placed = []
    x = 0
    for box_id, dims in zip(box_ids, extents):
        o = int(rng.integers(n_orient))
        oriented = apply_orientation(tuple(dims), o)
        placed.append(PlacedBox(int(box_id), o, oriented, x, 0, 0))
        x += oriented[0] + 1
    width = max(x, 1)
    depth = max((p.depth for p in placed), default=1)
    return placed, width, depth


def _as_pile_boxes(placed: Sequence[PlacedBox], targets: Dict[int, int]) -> Tuple:
    """Pile placements become orientation 0 of their BoxSpec; both sorted by id."""
    ordered = sorted(placed, key=lambda p: p.box_id)
    boxes = tuple(BoxSpec(p.box_id, p.dims, targets.get(p.box_id, 0)) for p in ordered)
    placements = tuple(replace(p, orientation=0) for p in ordered)
    return boxes, placements


def _pile(
    cfg: GenConfig,
    extents: Sequence[Dims],
    box_ids: Sequence[int],
    rng: np.random.Generator,
    side_check: bool,
) -> Tuple[List[PlacedBox], int, int]:
    if cfg.classical:
        return lay_out_flat(extents, box_ids, rng)
    depth = cfg.init_depth if cfg.dims_mode == 3 else None
    attempts = cfg.rotate_attempts if side_check else 1
    placed = pile_up(extents, box_ids, cfg.init_width, depth, rng, side_check, attempts)
    return placed, cfg.init_width, cfg.init_depth if cfg.dims_mode == 3 else 1


def _instance(
    cfg: GenConfig,
    placed: Sequence[PlacedBox],
    width: int,
    depth: int,
    targets: Dict[int, int],
    meta: Dict[str, Any],
) -> ProblemInstance:
    boxes, placements = _as_pile_boxes(placed, targets)
    return ProblemInstance(
        dims_mode=cfg.dims_mode,
        init_width=width,
        target_width=cfg.target_width,
        boxes=boxes,
        initial_placements=placements,
        init_depth=depth,
        target_depth=cfg.target_depth if cfg.dims_mode == 3 else 1,
        container_count=cfg.container_count,
        meta=meta,
    )


# ============================================================================
# RAND
# ============================================================================


def gen_rand(
    cfg: GenConfig, rng: Optional[np.random.Generator] = None, index: int = 0
) -> ProblemInstance:
    """
    One RAND instance.

    Box extents are sampled independently, then the boxes are dropped in a
    random order, each under a random orientation at a random feasible
    position.
    """
    rng = rng if rng is not None else derive_rng(cfg.seed, index)
    extents = [tuple(int(v) for v in row) for row in sample_dims(cfg, rng, cfg.n)]
    order = rng.permutation(cfg.n)
    placed, width, depth = _pile(
        cfg, [extents[i] for i in order], [int(i) for i in order], rng, side_check=False
    )
    targets = {}
    if cfg.container_count > 1:
        targets = {i: int(k) for i, k in enumerate(rng.integers(cfg.container_count, size=cfg.n))}
    meta = {"generator": "rand", "seed": cfg.seed, "index": index}
    return _instance(cfg, placed, width, depth, targets, meta)


# ============================================================================
# PPSG
# ============================================================================


def guillotine_split(
    width: int,
    height: int,
    n: int,
    rng: np.random.Generator,
    depth: Optional[int] = None,
) -> List[PlacedBox]:
    """
    Cut a ``width x height (x depth)`` block into ``n`` blocks by guillotine cuts.

    Each round picks a block with probability proportional to its area
    (volume), a cut axis with probability proportional to the block's extent
    along it, and a cut offset ``c`` in ``[1, extent - 1]`` with probability
    proportional to ``|c - extent / 2|`` (uniform when every weight is 0).
    Unit-sized blocks and unit-extent axes are never picked.

    Returns
    -------
    list of PlacedBox
        Blocks with ids ``0..n-1`` at their positions in the block, orientation 0

    Raises
    ------
    TapGenerationError
        If no block can be split before ``n`` blocks exist
    """
    if min(width, height, depth or 1) < 1 or n < 1:
        raise TapValueError(f"Cannot split a {width}x{height} block into {n} pieces")
    # (origin, extents) with axes ordered x, y[, z]
    extents = [width, height] if depth is None else [width, height, depth]
    blocks: List[Tuple[List[int], List[int]]] = [([0] * len(extents), extents)]
    while len(blocks) < n:
        splittable = [i for i, (_, ext) in enumerate(blocks) if max(ext) >= 2]
        if not splittable:
            raise TapGenerationError(f"All blocks are unit sized before reaching {n} blocks")
        sizes = np.array([math.prod(blocks[i][1]) for i in splittable], dtype=np.float64)
        pick = splittable[int(rng.choice(len(splittable), p=sizes / sizes.sum()))]
        origin, ext = blocks.pop(pick)

        axes = [a for a, e in enumerate(ext) if e >= 2]
        weights = np.array([ext[a] for a in axes], dtype=np.float64)
        axis = axes[int(rng.choice(len(axes), p=weights / weights.sum()))]

        offsets = np.arange(1, ext[axis])
        weights = np.abs(offsets - ext[axis] / 2)
        if weights.sum() == 0:
            cut = int(rng.choice(offsets))
        else:
            cut = int(rng.choice(offsets, p=weights / weights.sum()))

        first_ext, second_ext = list(ext), list(ext)
        first_ext[axis] = cut
        second_ext[axis] = ext[axis] - cut
        second_origin = list(origin)
        second_origin[axis] += cut
        blocks.insert(pick, (second_origin, second_ext))
        blocks.insert(pick, (list(origin), first_ext))

    placed = []
    for box_id, (origin, ext) in enumerate(blocks):
        z = origin[2] if depth is not None else 0
        placed.append(PlacedBox(box_id, 0, tuple(ext), origin[0], origin[1], z))
    return placed


def ppsg_height(cfg: GenConfig, n: int, rng: np.random.Generator) -> int:
    """Block height: expected total box size over the floor area, jittered by +-1."""
    base = int(round(n * expected_box_size(cfg) / cfg.target_area))
    jitter = int(rng.integers(-1, 2))
    return max(1, math.ceil(n / cfg.target_area), base + jitter)


def extraction_order(cpps: Sequence[PlacedBox], rng: np.random.Generator) -> List[PlacedBox]:
    """
    Take a perfect packing apart: repeatedly remove a random box with nothing on top.

    Boxes only block each other within the same container.
    """
    remaining = list(cpps)
    order = []
    while remaining:
        free = [
            box
            for box in remaining
            if not any(
                other is not box
                and other.container_idx == box.container_idx
                and other.y >= box.top
                and other.footprint_overlaps(box)
                for other in remaining
            )
        ]
        chosen = free[int(rng.integers(len(free)))]
        order.append(chosen)
        remaining.remove(chosen)
    return order


def witness_orientation(pile_dims: Dims, target_dims: Dims) -> int:
    """
    Orientation turning the pile extents into the packed extents.

    Top-access states are preferred, then the lowest index.
    """
    dims_mode = len(pile_dims)
    matches = [
        o
        for o in range(len(orientation_table(dims_mode)))
        if apply_orientation(pile_dims, o) == tuple(target_dims)
    ]
    if not matches:
        raise TapGenerationError(f"Extents {pile_dims} cannot be turned into {target_dims}")
    return min(matches, key=lambda o: (needs_side_access(dims_mode, o), o))


def _group_sizes(n: int, k: int) -> List[int]:
    return [n // k + (1 if c < n % k else 0) for c in range(k)]


def _attempt_ppsg(
    cfg: GenConfig, rng: np.random.Generator, index: int
) -> Tuple[ProblemInstance, Tuple[PlacedBox, ...]]:
    ids = [int(i) for i in rng.permutation(cfg.n)]
    depth = cfg.target_depth if cfg.dims_mode == 3 else None
    cpps: List[PlacedBox] = []
    heights = []
    for c, size in enumerate(_group_sizes(cfg.n, cfg.container_count)):
        height = ppsg_height(cfg, size, rng)
        heights.append(height)
        for block in guillotine_split(cfg.target_width, height, size, rng, depth):
            cpps.append(replace(block, box_id=ids[len(cpps)], container_idx=c))

    order = extraction_order(cpps, rng)
    placed, width, init_depth = _pile(
        cfg, [b.dims for b in order], [b.box_id for b in order], rng, side_check=True
    )
    pile_dims = {p.box_id: p.dims for p in placed}
    witness = tuple(
        replace(b, orientation=witness_orientation(pile_dims[b.box_id], b.dims))
        for b in reversed(order)
    )
    targets = {b.box_id: b.container_idx for b in cpps}
    meta = {"generator": "ppsg", "seed": cfg.seed, "index": index, "heights": heights}
    inst = _instance(cfg, placed, width, init_depth, targets, meta)
    return inst, witness


def verify_witness(inst: ProblemInstance, witness: Sequence[PlacedBox]) -> List[str]:
    """Replay a stored witness; it must be valid and score exactly 1 on every term."""
    violations = replay_solution(inst, Solution(tuple(witness)))
    if violations:
        return violations
    state = initial_state(inst)
    for step in witness:
        state = state.apply_placed(step)
    r = state.reward()
    if (r.C, r.P, r.S) != (1.0, 1.0, 1.0):
        return [f"witness reward C={r.C} P={r.P} S={r.S}"]
    return []


def gen_ppsg(
    cfg: GenConfig, rng: Optional[np.random.Generator] = None, index: int = 0
) -> Tuple[ProblemInstance, Tuple[PlacedBox, ...]]:
    """
    One PPSG instance and its perfect packing.

    Returns
    -------
    instance : ProblemInstance
        ``meta['witness']`` also holds the packing
    witness : tuple of PlacedBox
        Packing order (reverse extraction order) with target positions

    Raises
    ------
    TapGenerationError
        If no reversible instance is found within ``cfg.max_retries`` attempts
    """
    rng = rng if rng is not None else derive_rng(cfg.seed, index)
    for attempt in range(cfg.max_retries):
        try:
            inst, witness = _attempt_ppsg(cfg, rng, index)
        except TapGenerationError as e:
            logger.debug("PPSG %d attempt %d failed: %s", index, attempt, e)
            continue
        violations = verify_witness(inst, witness)
        if not violations:
            meta = dict(inst.meta, witness=witness, attempts=attempt + 1)
            return replace(inst, meta=meta), witness
        logger.debug("PPSG %d attempt %d not reversible: %s", index, attempt, violations)
    raise TapGenerationError(
        f"No reversible PPSG instance for index {index} after {cfg.max_retries} attempts"
    )


# ============================================================================
# Datasets
# ============================================================================


def generate_instance(cfg: GenConfig, index: int) -> ProblemInstance:
    """Instance ``index`` of the dataset described by ``cfg``."""
    rng = derive_rng(cfg.seed, index)
    if cfg.mode == "rand":
        return gen_rand(cfg, rng, index)
    return gen_ppsg(cfg, rng, index)[0]


@timer
def generate_dataset(cfg: GenConfig, workers: int = 1) -> List[ProblemInstance]:
    """
    All ``cfg.count`` instances, identical for any number of workers.

    Examples
    --------
    >>> len(generate_dataset(GenConfig(count=3)))
    3
    """
    instances = parallel_map(partial(generate_instance, cfg), range(cfg.count), workers)
    logger.info("Generated %d %s instances (seed=%d)", len(instances), cfg.mode, cfg.seed)
    return instances


def config_echo(cfg: GenConfig) -> Dict[str, Any]:
    """Generation settings plus derived quantities, for dataset manifests."""
    echo = cfg.to_dict()
    echo["expected_box_size"] = expected_box_size(cfg)
    return echo
