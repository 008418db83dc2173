"""
Learned selection policy for tapkit.

- network: PolicyConfig and the PackingPolicy torch module
- features: network inputs built from a packing state
- rollout: single and batched episodes
- checkpoint: versioned save / load
"""

from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .features import Observation, check_compatible, collate, observe, placeholder
from .network import DECODER_INPUTS, DYNAMIC_MODES, PackingPolicy, PolicyConfig
from .rollout import ROLLOUT_MODES, BatchRollout, FixedSlots, RolloutTrace, rollout, rollout_batch

__all__ = [
    "PolicyConfig",
    "PackingPolicy",
    "DYNAMIC_MODES",
    "DECODER_INPUTS",
    "Observation",
    "observe",
    "placeholder",
    "collate",
    "check_compatible",
    "ROLLOUT_MODES",
    "FixedSlots",
    "RolloutTrace",
    "BatchRollout",
    "rollout",
    "rollout_batch",
    "FORMAT_VERSION",
    "save_checkpoint",
    "load_checkpoint",
]
