"""
Checkpoint files.

A checkpoint is a ``torch.save`` archive of a plain dict::

    {
        "format_version": 1,
        "config": {...},          # PolicyConfig fields
        "state_dict": {...},      # parameter name -> tensor
        "meta": {...},            # free-form: epoch, metrics, seed, ...
    }

Tensors are stored as torch serializes them (little-endian, shapes
included) and are loaded with ``weights_only=True``.
"""

import logging
import os
from typing import Any, Dict, Optional, Tuple, Union

import torch

from ..exceptions import TapIOError, TapValueError
from ..utils.helpers import atomic_write
from .network import PackingPolicy, PolicyConfig

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

PathLike = Union[str, os.PathLike]


def save_checkpoint(
    path: PathLike, policy: PackingPolicy, meta: Optional[Dict[str, Any]] = None
) -> None:
    """
    Write a checkpoint atomically.

    Raises
    ------
    TapIOError
        If the file cannot be written
    """
    payload = {
        "format_version": FORMAT_VERSION,
        "config": policy.config.to_dict(),
        "state_dict": {k: v.detach().clone() for k, v in policy.state_dict().items()},
        "meta": dict(meta or {}),
    }
    with atomic_write(path, "wb") as handle:
        torch.save(payload, handle)
    logger.debug("Saved checkpoint to %s", path)


def load_checkpoint(path: PathLike) -> Tuple[PackingPolicy, Dict[str, Any]]:
    """
    Rebuild a policy from a checkpoint.

    Returns
    -------
    policy : PackingPolicy
        In evaluation mode, with the stored parameter dtype
    meta : dict

    Raises
    ------
    TapIOError
        If the file cannot be read
    TapValueError
        If the format version is unknown or the shapes do not match the config
    """
    try:
        payload = torch.load(os.fspath(path), map_location="cpu", weights_only=True)
    except (OSError, RuntimeError, EOFError) as e:
        raise TapIOError(f"Cannot read checkpoint {path}: {e}") from e

    version = payload.get("format_version") if isinstance(payload, dict) else None
    if version != FORMAT_VERSION:
        raise TapValueError(f"Unsupported checkpoint format version {version} in {path}")

    policy = PackingPolicy(PolicyConfig.from_dict(payload["config"]))
    state_dict = payload["state_dict"]
    dtype = next(iter(state_dict.values())).dtype
    policy = policy.to(dtype)
    try:
        policy.load_state_dict(state_dict)
    except RuntimeError as e:
        raise TapValueError(f"Checkpoint {path} does not match its config: {e}") from e
    policy.eval()
    return policy, dict(payload.get("meta", {}))
