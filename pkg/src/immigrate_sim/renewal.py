"""Zero-delayed random walks, first passage, and renewal shot noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .heavytail_rng import STREAM_WALK, SeedSpec, TailLaw, _open_uniforms

__all__ = ["RenewalPath", "simulate_walk", "first_passage", "shot_noise"]

# Increments are drawn in fixed-size blocks so the consumed stream is a
# deterministic function of the seed alone.
_BLOCK = 256


@dataclass(frozen=True, eq=False)
class RenewalPath:
    """A realized random-walk trajectory truncated just past a horizon.

    arrivals[0] is always 0 and the last element is the first partial sum
    strictly beyond the horizon, so first-passage queries are decidable
    for every t <= horizon without resampling.
    """

    arrivals: np.ndarray
    horizon: float

    def __post_init__(self):
        arr = np.asarray(self.arrivals, dtype=np.float64)
        object.__setattr__(self, "arrivals", arr)
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if arr.size < 2:
            raise ValueError("arrivals must contain the origin and an overshoot point")
        if arr[0] != 0.0:
            raise ValueError("arrivals must start at 0")
        if not np.all(np.diff(arr) > 0.0):
            raise ValueError("arrivals must be strictly increasing")
        if not arr[-1] > self.horizon:
            raise ValueError("last arrival must overshoot the horizon")

    @classmethod
    def from_increments(cls, increments, horizon: float) -> "RenewalPath":
        """Build a path from explicit increments; handy for fixtures."""
        inc = np.asarray(increments, dtype=np.float64)
        arrivals = np.concatenate([[0.0], np.cumsum(inc)])
        return cls(arrivals=arrivals, horizon=float(horizon))


def simulate_walk(law: TailLaw, horizon: float, seed: SeedSpec) -> RenewalPath:
    """Simulate partial sums of i.i.d. draws until one exceeds the horizon.

    Args:
        law: increment law (strictly positive draws).
        horizon: positive time horizon; the first overshooting sum is kept.
        seed: replicate seed; increments come from the walk substream.

    Returns:
        RenewalPath with arrivals (0, S_1, ..., S_M) where S_M is the
        first sum > horizon.
    """
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    rng = seed.generator(STREAM_WALK)
    parts = []
    total = 0.0
    while total <= horizon:
        draws = law.inverse_survival(_open_uniforms(rng, _BLOCK))
        sums = np.cumsum(draws) + total
        parts.append(sums)
        total = float(sums[-1])
    arrivals = np.concatenate([[0.0], *parts])
    stop = int(np.searchsorted(arrivals, horizon, side="right"))
    return RenewalPath(arrivals=arrivals[: stop + 1], horizon=float(horizon))


def first_passage(path: RenewalPath, t: float) -> int:
    """nu(t) = inf{k >= 0 : S_k > t}, with strict inequality.

    Because arrivals strictly increase this equals the number of arrivals
    in [0, t]; ties at t count the arrival (S_k = t is not > t).

    Raises:
        ValueError: if t exceeds the path horizon (the stored path cannot
            decide the first passage there).
    """
    if t > path.horizon:
        raise ValueError(f"t={t} exceeds path horizon {path.horizon}")
    return int(np.searchsorted(path.arrivals, t, side="right"))


def shot_noise(path: RenewalPath, h: Callable, t: float) -> float:
    """Sum of h(t - S_k) over arrivals S_k <= t.

    Args:
        path: realized walk covering t.
        h: vectorized deterministic response mean, defined on [0, inf).
            A scalar-returning h (for instance ``lambda x: 1.0``) is
            broadcast over the arrivals.
        t: query time, at most path.horizon; negative t gives the empty
            sum.

    Returns:
        The shot-noise value as a float.
    """
    m = first_passage(path, t)
    if m == 0:
        return 0.0
    values = np.asarray(h(t - path.arrivals[:m]), dtype=np.float64)
    if values.ndim == 0:
        values = np.full(m, float(values))
    return float(np.sum(values))
