"""
Custom exception hierarchy for the tapkit package.

Every error raised by tapkit derives from :class:`TapError`, so callers can
catch the whole family at once. Subclasses also derive from the closest builtin
exception where one exists.
"""

from typing import List, Optional, Sequence


class TapError(Exception):
    """Base exception for all tapkit errors."""

    pass


class TapValueError(TapError, ValueError):
    """Raised when an argument violates an operation's contract."""

    pass


class TapValidationError(TapError, ValueError):
    """Raised when a problem instance fails validation."""

    def __init__(self, violations: Sequence[str], context: Optional[str] = None):
        self.violations: List[str] = list(violations)
        message = "Invalid instance"
        if context:
            message += f" ({context})"
        message += ": " + "; ".join(self.violations)
        super().__init__(message)


class TapBoundsError(TapError, IndexError):
    """Raised when a footprint lies outside the container."""

    def __init__(self, footprint: Sequence[int], extent: Sequence[int]):
        super().__init__(f"Footprint {tuple(footprint)} outside container extent {tuple(extent)}")


class TapFeasibilityError(TapError):
    """Raised when a transport step is not allowed by the precedence graph."""

    pass


class TapInfeasiblePlacementError(TapFeasibilityError):
    """Raised when no placement candidate exists for a box."""

    def __init__(self, dims: Sequence[int], container: Sequence[int]):
        super().__init__(
            f"No placement for box {tuple(dims)} in container of width {tuple(container)}"
        )


class TapInvalidStateError(TapError):
    """Raised when a packing state is physically impossible (e.g. a floating box)."""

    pass


class TapCapacityError(TapError):
    """Raised when an instance has more boxes than the network capacity."""

    def __init__(self, boxes: int, capacity: int):
        self.boxes = boxes
        self.capacity = capacity
        super().__init__(
            f"Instance has {boxes} boxes but the network capacity is {capacity}; "
            "use rolling mode (--rolling) for larger instances"
        )


class TapGenerationError(TapError):
    """Raised when dataset generation cannot produce a valid instance."""

    pass


class TapTrainingError(TapError):
    """Raised when training hits a non-recoverable numeric problem."""

    def __init__(self, reason: str, dump_path: Optional[str] = None):
        self.dump_path = dump_path
        message = f"Training aborted: {reason}"
        if dump_path:
            message += f" (offending batch written to {dump_path})"
        super().__init__(message)


class TapIOError(TapError, IOError):
    """Raised when an I/O operation fails."""

    pass
