"""
Dataset generation for tapkit (RAND and PPSG instance sets).
"""

from .generators import (
    MODES,
    GenConfig,
    config_echo,
    expected_box_size,
    extraction_order,
    gen_ppsg,
    gen_rand,
    generate_dataset,
    generate_instance,
    guillotine_split,
    lay_out_flat,
    pile_up,
    ppsg_height,
    sample_dims,
    size_pmf,
    verify_witness,
    witness_orientation,
)

__all__ = [
    "MODES",
    "GenConfig",
    "size_pmf",
    "expected_box_size",
    "sample_dims",
    "pile_up",
    "lay_out_flat",
    "gen_rand",
    "guillotine_split",
    "ppsg_height",
    "extraction_order",
    "witness_orientation",
    "verify_witness",
    "gen_ppsg",
    "generate_instance",
    "generate_dataset",
    "config_echo",
]
