import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "FLOODVIBE_THREADS"


def thread_count(requested: int | None = None) -> int:
    """Worker count from ``requested`` or ``$FLOODVIBE_THREADS`` (0 or unset = auto)."""
    if requested is None:
        raw = os.environ.get(ENV_VAR, "0").strip() or "0"
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if requested < 0:
        raise ValueError(f"thread count must be >= 0, got {requested}")
    return requested or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int) -> Iterator[R]:
    """``map`` that may run on a thread pool but always yields in input order."""
    if threads <= 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(fn, items)
