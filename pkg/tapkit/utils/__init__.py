"""
Utility functions for tapkit.

Provides the timing decorator, seeded random streams, logging setup,
process-pool mapping and atomic file writes.
"""

from .helpers import (
    LOG_FORMAT,
    THREADS_ENV,
    atomic_write,
    configure_logging,
    default_threads,
    derive_rng,
    parallel_map,
    timer,
)

__all__ = [
    # Decorators
    "timer",
    # Randomness
    "derive_rng",
    # Environment and logging
    "THREADS_ENV",
    "LOG_FORMAT",
    "default_threads",
    "configure_logging",
    # Parallel
    "parallel_map",
    # Files
    "atomic_write",
]
