"""Chunked evaluation helpers shared by the streaming measures."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, Tuple, TypeVar

T = TypeVar("T")

DEFAULT_CHUNK = 1 << 20
ENV_THREADS = "CORRLAB_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: CORRLAB_THREADS wins, then the argument; 0 means all cores."""
    env = os.environ.get(ENV_THREADS)
    if env is not None and env.strip():
        threads = int(env)
    if not threads:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"worker count must be >= 0, got {threads}")
    return threads


def chunk_ranges(lo: int, hi: int, size: int = DEFAULT_CHUNK,
                 cuts: Iterable[int] = ()) -> List[Tuple[int, int]]:
    """Split [lo, hi) into pieces of at most ``size``, also breaking at every cut."""
    if size < 1:
        raise ValueError("chunk size must be positive")
    points = {lo, hi}
    points.update(c for c in cuts if lo < c < hi)
    points.update(range(lo, hi, size))
    edges = sorted(points)
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def map_chunks(fn: Callable[[int, int], T], ranges: Sequence[Tuple[int, int]],
               threads: int | None = None) -> List[T]:
    # results come back in range order, so merges are independent of scheduling
    workers = min(resolve_threads(threads), max(len(ranges), 1))
    if workers == 1:
        return [fn(a, b) for a, b in ranges]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda ab: fn(*ab), ranges))
