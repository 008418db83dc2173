"""
Utility functions and decorators for tapkit.

Timing, seeded random streams, logging setup, worker pools and atomic file
writes shared by generation, solving, training and the CLI.
"""

import logging
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from functools import wraps
from typing import Any, Callable, Iterable, Iterator, List, Optional, TypeVar, Union

import numpy as np

from ..exceptions import TapIOError, TapValueError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "TAP_NUM_THREADS"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# ============================================================================
# Decorators
# ============================================================================


def timer(func: Callable) -> Callable:
    """
    Decorator to time function execution.

    The elapsed time is logged at DEBUG on the ``tapkit.utils.helpers``
    logger.

    Examples
    --------
    >>> @timer
    ... def solve_all(instances):
    ...     return [solve_greedy(inst) for inst in instances]
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start
        logger.debug("%s took %.3fs", func.__name__, elapsed)
        return result

    return wrapper


# ============================================================================
# Randomness
# ============================================================================


def derive_rng(seed: Optional[int], index: int = 0) -> np.random.Generator:
    """
    Independent generator for item ``index`` of a seeded batch.

    Streams depend only on ``(seed, index)``, so results do not change with
    the number of workers or the order work is scheduled in.

    Examples
    --------
    >>> derive_rng(7, 3).integers(100) == derive_rng(7, 3).integers(100)
    True
    """
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng([int(seed), int(index)])


# ============================================================================
# Environment and logging
# ============================================================================


def default_threads() -> int:
    """Thread count from ``TAP_NUM_THREADS`` (1 when unset)."""
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as e:
        raise TapValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if value < 1:
        raise TapValueError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """
    Attach one stream handler to the ``tapkit`` logger.

    Parameters
    ----------
    verbosity : int
        ``<0`` errors only, ``0`` warnings, ``1`` info, ``>=2`` debug
    """
    level = {-1: logging.ERROR, 0: logging.WARNING, 1: logging.INFO}.get(
        max(-1, min(verbosity, 2)), logging.DEBUG
    )
    root = logging.getLogger("tapkit")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
    return root


# ============================================================================
# Parallel map
# ============================================================================


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Map ``func`` over ``items``, in a process pool when ``workers > 1``.

    Output order always follows input order. ``func`` must be picklable
    (a module-level function or a ``functools.partial`` of one).
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# ============================================================================
# Files
# ============================================================================


@contextmanager
def atomic_write(path: Union[str, os.PathLike], mode: str = "w") -> Iterator[Any]:
    """
    Write to a temporary file next to ``path`` and rename it into place.

    Readers never observe a partially written file.

    Raises
    ------
    TapIOError
        If the file cannot be written
    """
    target = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(target))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    except OSError as e:
        raise TapIOError(f"Cannot write {target}: {e}") from e

    encoding = None if "b" in mode else "utf-8"
    newline = None if "b" in mode else "\n"
    try:
        with os.fdopen(fd, mode, encoding=encoding, newline=newline) as handle:
            yield handle
        os.replace(tmp, target)
    except OSError as e:
        _discard(tmp)
        raise TapIOError(f"Cannot write {target}: {e}") from e
    except BaseException:
        _discard(tmp)
        raise


def _discard(path: str) -> None:
    try:
        os.unlink(path)
    except OSError:
        pass
