"""
I/O operations for tapkit - read and write instances, solutions, datasets and metrics.

File formats (all versioned, all coordinates integers):

- instance : JSON object ``{"format": "tapkit.instance", "version": 1, ...}``
- solution : JSON object ``{"format": "tapkit.solution", "version": 1, ...}``
- dataset  : directory of ``instance_NNNNNN.json`` files plus ``manifest.json``
             holding the generation settings, the count and a SHA-256
             checksum over the instance files in order
- metrics  : CSV written by pandas

JSON is written with sorted keys and a fixed indent, so equal objects give
byte-identical files. Every write goes through a temporary file and a rename.
"""

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from ..core.geometry import BoxSpec, PlacedBox
from ..core.instance import ProblemInstance, Solution
from ..exceptions import TapIOError, TapValueError
from ..packing.reward import RewardBreakdown
from ..utils.helpers import atomic_write

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = "manifest.json"

PathLike = Union[str, os.PathLike]


# ============================================================================
# Dict conversion
# ============================================================================


def placement_to_dict(p: PlacedBox) -> Dict[str, Any]:
    return {
        "id": p.box_id,
        "orientation": p.orientation,
        "dims": list(p.dims),
        "x": p.x,
        "y": p.y,
        "z": p.z,
        "container": p.container_idx,
    }


def placement_from_dict(d: Dict[str, Any]) -> PlacedBox:
    return PlacedBox(
        box_id=int(d["id"]),
        orientation=int(d["orientation"]),
        dims=tuple(int(v) for v in d["dims"]),
        x=int(d["x"]),
        y=int(d["y"]),
        z=int(d.get("z", 0)),
        container_idx=int(d.get("container", 0)),
    )


def instance_to_dict(inst: ProblemInstance) -> Dict[str, Any]:
    """JSON-ready dict; a PPSG witness in ``meta`` is stored as a top-level list."""
    meta = dict(inst.meta)
    witness = meta.pop("witness", None)
    data: Dict[str, Any] = {
        "format": "tapkit.instance",
        "version": FORMAT_VERSION,
        "dims_mode": inst.dims_mode,
        "init_width": inst.init_width,
        "init_depth": inst.init_depth,
        "target_width": inst.target_width,
        "target_depth": inst.target_depth,
        "container_count": inst.container_count,
        "boxes": [
            {"id": b.id, "dims": list(b.dims), "target_idx": b.target_idx} for b in inst.boxes
        ],
        "initial_placements": [placement_to_dict(p) for p in inst.initial_placements],
        "meta": meta,
    }
    if witness is not None:
        data["witness"] = [placement_to_dict(p) for p in witness]
    return data


def _check_format(data: Dict[str, Any], kind: str) -> None:
    if data.get("format") != kind:
        raise TapValueError(f"Expected a '{kind}' document, got '{data.get('format')}'")
    if data.get("version") != FORMAT_VERSION:
        raise TapValueError(f"Unsupported {kind} version {data.get('version')}")


def instance_from_dict(data: Dict[str, Any]) -> ProblemInstance:
    _check_format(data, "tapkit.instance")
    meta = dict(data.get("meta", {}))
    if "witness" in data:
        meta["witness"] = tuple(placement_from_dict(p) for p in data["witness"])
    return ProblemInstance(
        dims_mode=int(data["dims_mode"]),
        init_width=int(data["init_width"]),
        target_width=int(data["target_width"]),
        boxes=tuple(
            BoxSpec(int(b["id"]), tuple(int(v) for v in b["dims"]), int(b.get("target_idx", 0)))
            for b in data["boxes"]
        ),
        initial_placements=tuple(placement_from_dict(p) for p in data["initial_placements"]),
        init_depth=int(data.get("init_depth", 1)),
        target_depth=int(data.get("target_depth", 1)),
        container_count=int(data.get("container_count", 1)),
        meta=meta,
    )


def _reward_from_dict(d: Optional[Dict[str, Any]]) -> Optional[RewardBreakdown]:
    return None if d is None else RewardBreakdown(**d)


def solution_to_dict(solution: Solution) -> Dict[str, Any]:
    return {
        "format": "tapkit.solution",
        "version": FORMAT_VERSION,
        "method": solution.method,
        "steps": [placement_to_dict(p) for p in solution.steps],
        "reward": solution.reward.to_dict() if solution.reward is not None else None,
        "container_rewards": [r.to_dict() for r in solution.container_rewards],
        "meta": dict(solution.meta),
    }


def solution_from_dict(data: Dict[str, Any]) -> Solution:
    _check_format(data, "tapkit.solution")
    return Solution(
        steps=tuple(placement_from_dict(p) for p in data["steps"]),
        reward=_reward_from_dict(data.get("reward")),
        container_rewards=tuple(RewardBreakdown(**r) for r in data.get("container_rewards", [])),
        method=data.get("method", ""),
        meta=dict(data.get("meta", {})),
    )


# ============================================================================
# JSON files
# ============================================================================


def dumps(data: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _write_json(data: Dict[str, Any], path: PathLike) -> str:
    text = dumps(data)
    with atomic_write(path) as handle:
        handle.write(text)
    return text


def _read_json(path: PathLike) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise TapIOError(f"Failed to read JSON file {path}: {str(e)}") from e


def read_instance(path: PathLike) -> ProblemInstance:
    """
    Read a ProblemInstance from JSON.

    Raises
    ------
    TapIOError
        If the file cannot be read or parsed
    TapValueError
        If the document is not a supported instance

    Examples
    --------
    >>> inst = read_instance('pile.json')
    """
    return instance_from_dict(_read_json(path))


def write_instance(inst: ProblemInstance, path: PathLike) -> None:
    """Write a ProblemInstance as canonical JSON."""
    _write_json(instance_to_dict(inst), path)


def read_solution(path: PathLike) -> Solution:
    """Read a Solution from JSON."""
    return solution_from_dict(_read_json(path))


def write_solution(solution: Solution, path: PathLike) -> None:
    """Write a Solution as canonical JSON."""
    _write_json(solution_to_dict(solution), path)


# ============================================================================
# Datasets
# ============================================================================


def instance_filename(index: int) -> str:
    return f"instance_{index:06d}.json"


def write_dataset(
    instances: Sequence[ProblemInstance],
    directory: PathLike,
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Write a dataset directory and its manifest.

    Parameters
    ----------
    instances : sequence of ProblemInstance
    directory : path
        Created when missing
    config : dict, optional
        Generation settings echoed into the manifest

    Returns
    -------
    dict
        The manifest
    """
    root = Path(directory)
    digest = hashlib.sha256()
    files = []
    for index, inst in enumerate(instances):
        name = instance_filename(index)
        text = _write_json(instance_to_dict(inst), root / name)
        digest.update(text.encode("utf-8"))
        files.append(name)
    config = dict(config or {})
    manifest = {
        "format": "tapkit.dataset",
        "version": FORMAT_VERSION,
        "config": config,
        "seed": config.get("seed"),
        "count": len(files),
        "files": files,
        "checksum": digest.hexdigest(),
    }
    _write_json(manifest, root / MANIFEST)
    logger.info("Wrote %d instances to %s", len(files), root)
    return manifest


def read_manifest(directory: PathLike) -> Dict[str, Any]:
    manifest = _read_json(Path(directory) / MANIFEST)
    _check_format(manifest, "tapkit.dataset")
    return manifest


def read_dataset(
    directory: PathLike, verify: bool = True
) -> Tuple[List[ProblemInstance], Dict[str, Any]]:
    """
    Read every instance listed in a dataset manifest.

    Raises
    ------
    TapIOError
        If a file is missing or the checksum does not match
    """
    root = Path(directory)
    manifest = read_manifest(root)
    digest = hashlib.sha256()
    instances = []
    for name in manifest["files"]:
        try:
            text = (root / name).read_text(encoding="utf-8")
        except OSError as e:
            raise TapIOError(f"Failed to read dataset file {root / name}: {str(e)}") from e
        digest.update(text.encode("utf-8"))
        instances.append(instance_from_dict(json.loads(text)))
    if verify and digest.hexdigest() != manifest["checksum"]:
        raise TapIOError(f"Checksum mismatch in dataset {root}")
    return instances, manifest


def read_instances(path: PathLike) -> List[ProblemInstance]:
    """A dataset directory or a single instance file."""
    if Path(path).is_dir():
        return read_dataset(path)[0]
    return [read_instance(path)]


# ============================================================================
# Metrics
# ============================================================================


def to_csv(df: pd.DataFrame, path: PathLike, **kwargs: Any) -> None:
    """
    Write a metrics table to CSV atomically.

    Floats are written with full precision so reruns compare byte for byte.
    """
    kwargs.setdefault("index", False)
    text = df.to_csv(**kwargs)
    with atomic_write(path) as handle:
        handle.write(text)


def read_metrics(path: PathLike) -> pd.DataFrame:
    """Read a metrics CSV written by :func:`to_csv`."""
    try:
        return pd.read_csv(path)
    except Exception as e:
        raise TapIOError(f"Failed to read CSV file: {str(e)}") from e
