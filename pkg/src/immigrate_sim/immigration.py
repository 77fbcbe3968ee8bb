"""The immigration process Y and its martingale/shot-noise decomposition.

Y(u) = sum over arrivals S_k <= u of X_{k+1}(u - S_k), where each arrival
starts a fresh response.  Splitting each response into its mean h and the
centered remainder decomposes Y pathwise into a renewal shot noise plus a
martingale-like part; the scaled sup of the latter is the negligibility
diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heavytail_rng import STREAM_ETA, ParetoAlpha, SeedSpec
from .renewal import simulate_walk
from .response import (
    Amplitude,
    Deterministic,
    QueueIndicator,
    ResponseSpec,
    mean_h,
    paired_etas,
)

__all__ = [
    "ProcessSample",
    "scaling_factor",
    "simulate_Y",
    "martingale_sup_diagnostic",
]


@dataclass(frozen=True, eq=False)
class ProcessSample:
    """One replicate of the scaled process on a u-grid at one scale t.

    All three stored series carry the same analytic scaling factor, so
    y_scaled = martingale_part + shot_part holds pointwise up to float
    accumulation.
    """

    t_scale: float
    u_grid: np.ndarray
    y_scaled: np.ndarray
    shot_part: np.ndarray
    martingale_part: np.ndarray
    replicate: SeedSpec


def scaling_factor(spec: ResponseSpec, t: float) -> float:
    """The analytic normalization P{xi > t} / h(t) at scale t.

    Uses exact survival and mean evaluations, never empirical ones, so
    scaling noise cannot pollute convergence diagnostics.
    """
    num = float(ParetoAlpha(spec.xi_alpha).survival(t))
    den = float(mean_h(spec, t))
    return num / den


def _raw_values(spec: ResponseSpec, arrivals: np.ndarray, etas, T: float):
    """Raw (unscaled) Y(T) and its shot-noise part for one replicate.

    arrivals must cover T (last arrival beyond T); etas are the paired
    response draws for arrivals[:-1], or None for the Deterministic model.
    """
    m = int(np.searchsorted(arrivals, T, side="right"))
    if m == 0:
        return 0.0, 0.0
    ages = T - arrivals[:m]
    model = spec.model
    if isinstance(model, QueueIndicator):
        y_raw = float(np.count_nonzero(etas[:m] > ages))
    elif isinstance(model, Amplitude):
        y_raw = float(
            np.dot(etas[:m], model.f_scale * (1.0 + ages) ** model.f_rho)
        )
    else:
        y_raw = float(np.sum(mean_h(spec, ages)))
    shot_raw = float(np.sum(mean_h(spec, ages)))
    return y_raw, shot_raw


def simulate_Y(
    spec: ResponseSpec, t_scale: float, u_grid, seed: SeedSpec
) -> ProcessSample:
    """Simulate one scaled replicate of Y(u * t) over a u-grid.

    One walk is simulated to horizon max(u_grid) * t_scale and one
    response is drawn per arrival; every grid point reuses the same
    (X_k, xi_k) pairs, as the process definition requires.

    Args:
        spec: response family with interarrival tail index.
        t_scale: the scale t; the scaling factor P{xi > t} / h(t) is
            applied to all outputs.
        u_grid: strictly increasing probe locations with min > 0 (the
            limit lives on (0, inf)).
        seed: replicate seed.

    Returns:
        ProcessSample with scaled values, shot-noise part, and
        martingale part per grid point.
    """
    u = np.asarray(u_grid, dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("u_grid must be a non-empty 1-d grid")
    if not np.all(np.diff(u) > 0.0):
        raise ValueError("u_grid must be strictly increasing")
    if not u[0] > 0.0:
        raise ValueError(f"u_grid min must be positive, got {u[0]}")
    if not t_scale > 0.0:
        raise ValueError(f"t_scale must be positive, got {t_scale}")

    horizon = float(u[-1] * t_scale)
    walk = simulate_walk(ParetoAlpha(spec.xi_alpha), horizon, seed)
    # Arrival S_k pairs with the following interarrival xi_{k+1}.
    xi = np.diff(walk.arrivals)
    etas = paired_etas(spec, xi, seed.generator(STREAM_ETA))

    scale = scaling_factor(spec, t_scale)
    y_scaled = np.empty(u.size)
    shot_part = np.empty(u.size)
    mart_part = np.empty(u.size)
    for i, ui in enumerate(u):
        y_raw, shot_raw = _raw_values(spec, walk.arrivals, etas, float(ui * t_scale))
        y_scaled[i] = scale * y_raw
        shot_part[i] = scale * shot_raw
        mart_part[i] = scale * (y_raw - shot_raw)
    return ProcessSample(
        t_scale=float(t_scale),
        u_grid=u,
        y_scaled=y_scaled,
        shot_part=shot_part,
        martingale_part=mart_part,
        replicate=seed,
    )


def martingale_sup_diagnostic(samples) -> dict[float, float]:
    """Mean over replicates of sup_u |martingale part|, per scale t.

    A desk-scale proxy for the sup-norm negligibility of the centered
    part: when the scaled process converges it should decay as t grows.

    Args:
        samples: ProcessSample collection sharing one u-grid.

    Returns:
        {t_scale: mean sup |martingale_part|}, sorted by t_scale.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("at least one ProcessSample is required")
    grid = samples[0].u_grid
    sups: dict[float, list[float]] = {}
    for s in samples:
        if s.u_grid.shape != grid.shape or not np.array_equal(s.u_grid, grid):
            raise ValueError("all samples must share the same u_grid")
        sups.setdefault(s.t_scale, []).append(float(np.max(np.abs(s.martingale_part))))
    return {t: float(np.mean(v)) for t, v in sorted(sups.items())}
