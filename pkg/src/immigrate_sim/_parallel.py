"""Replicate-indexed worker pool with scheduler-independent results."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

__all__ = ["resolve_threads", "map_indexed", "map_indexed_objects"]


def resolve_threads(threads: int | None) -> int:
    """Worker count: explicit value, else IMMIGRATE_SIM_THREADS, else CPUs."""
    if threads is not None and threads > 0:
        return int(threads)
    env = os.environ.get("IMMIGRATE_SIM_THREADS", "").strip()
    if env:
        value = int(env)
        if value > 0:
            return value
    return os.cpu_count() or 1


def map_indexed(fn: Callable[[int], float], n: int, threads: int | None) -> np.ndarray:
    """Evaluate fn(0..n-1) into an index-ordered array.

    Results land at their own index regardless of completion order, so
    the output is identical for any worker count; fn must be pure given
    its index (per-replicate seeding guarantees this for simulations).
    """
    out = np.empty(n)
    workers = min(resolve_threads(threads), n) if n else 1
    if workers <= 1:
        for i in range(n):
            out[i] = fn(i)
        return out

    chunk = max(1, -(-n // (4 * workers)))
    starts = range(0, n, chunk)

    def run_chunk(start: int) -> None:
        for i in range(start, min(start + chunk, n)):
            out[i] = fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_chunk, starts))
    return out


def map_indexed_objects(fn: Callable[[int], object], n: int, threads: int | None) -> list:
    """map_indexed for fn returning arbitrary objects instead of floats."""
    out: list = [None] * n
    workers = min(resolve_threads(threads), n) if n else 1
    if workers <= 1:
        for i in range(n):
            out[i] = fn(i)
        return out

    chunk = max(1, -(-n // (4 * workers)))

    def run_chunk(start: int) -> None:
        for i in range(start, min(start + chunk, n)):
            out[i] = fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run_chunk, range(0, n, chunk)))
    return out
