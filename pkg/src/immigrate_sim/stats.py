"""Monte Carlo orchestration and desk-scale convergence checks.

Turns the asymptotic statements about the immigration process into
finite-sample diagnostics: two-sample Kolmogorov-Smirnov distances between
scaled marginals and the limit law, and empirical moments of the scaled
shot noise against the closed-form limit moments.  No rates are available
in theory, so thresholds are engineering choices and every check also
reports the raw trend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import map_indexed
from .heavytail_rng import ParetoAlpha, SeedSpec
from .immigration import simulate_Y
from .limitproc import fiiss_moment_closed_form, sample_fiiss
from .renewal import first_passage, simulate_walk
from .response import ResponseSpec, limit_rho

__all__ = [
    "MomentReport",
    "ConvergenceReport",
    "empirical_moment",
    "ks_statistic",
    "flt_marginal_check",
    "shot_noise_moment_check",
]

_STATISTICS = ("ks", "abs_moment_gap", "sup_martingale")


@dataclass(frozen=True)
class MomentReport:
    """An empirical moment estimate paired against its closed-form limit."""

    label: str
    l: int
    empirical: float
    std_error: float
    theoretical: float
    n_replicates: int
    t_scale: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.empirical):
            raise ValueError("empirical moment must be finite")
        if self.std_error < 0.0:
            raise ValueError("std_error must be non-negative")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "l": self.l,
            "empirical": self.empirical,
            "std_error": self.std_error,
            "theoretical": self.theoretical,
            "n_replicates": self.n_replicates,
            "t_scale": self.t_scale,
        }


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Distances to the limit along an increasing grid of scales."""

    t_grid: np.ndarray
    distances: np.ndarray
    statistic: str = "ks"

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=np.float64)
        d = np.asarray(self.distances, dtype=np.float64)
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "distances", d)
        if self.statistic not in _STATISTICS:
            raise ValueError(
                f"statistic must be one of {_STATISTICS}, got {self.statistic!r}"
            )
        if t.shape != d.shape or t.ndim != 1:
            raise ValueError("t_grid and distances must be 1-d and equally long")
        if np.any(d < 0.0):
            raise ValueError("distances must be non-negative")
        if self.statistic == "ks" and np.any(d > 1.0):
            raise ValueError("ks distances must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "t_grid": self.t_grid.tolist(),
            "distances": self.distances.tolist(),
        }


def empirical_moment(samples, l: int) -> tuple[float, float]:
    """Mean of x**l with its standard error.

    Args:
        samples: at least two real observations.
        l: positive integer moment order.

    Returns:
        (estimate, std_error) with std_error = sample sd / sqrt(n).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("at least 2 samples are required")
    if l < 1:
        raise ValueError(f"l must be a positive integer, got {l}")
    powers = x**l
    return float(np.mean(powers)), float(np.std(powers, ddof=1) / np.sqrt(x.size))


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance.

    Sup over the pooled sample points of |Fhat_a - Fhat_b|, with ties
    handled by right-continuous empirical CDFs.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    pooled = np.concatenate([a, b])
    pooled.sort()
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def scaled_marginal_samples(
    spec: ResponseSpec,
    t_scale: float,
    u_probe: float,
    n: int,
    seed: SeedSpec,
    base_index: int = 0,
    threads: int | None = None,
) -> np.ndarray:
    """n independent replicates of the scaled marginal Y(u_probe * t)."""
    grid = np.asarray([u_probe], dtype=np.float64)

    def one(i: int) -> float:
        sample = simulate_Y(spec, t_scale, grid, seed.child(base_index + i))
        return float(sample.y_scaled[0])

    return map_indexed(one, n, threads)


def flt_marginal_check(
    spec: ResponseSpec,
    t_grid,
    u_probe: float,
    n: int,
    seed: SeedSpec,
    grid_step: float = 1e-4,
    n_y: int = 10**4,
    threads: int | None = None,
    return_samples: bool = False,
):
    """KS distance between scaled marginals and the limit law, per scale.

    For each t in t_grid, compares n replicates of the scaled Y(u_probe*t)
    against n freshly sampled values of the limit J(u_probe); the limit
    sample is generated per check (not cached) so every report is
    self-contained and seed-auditable.

    Args:
        spec: response family (also fixes the limit indices).
        t_grid: increasing scales to probe.
        u_probe: positive probe location.
        n: replicates per side.
        seed: master seed; replicate blocks per scale are disjoint.
        grid_step: subordinator time step for the limit sample.
        n_y: y-grid size for the limit sample.
        threads: worker count (None: --threads/env/machine default).
        return_samples: also return the raw sample arrays.

    Returns:
        ConvergenceReport with statistic "ks"; with return_samples, a
        (report, samples) pair where samples maps "J" and each scale to
        its array.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d grid")
    if np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing")
    if not u_probe > 0.0:
        raise ValueError(f"u_probe must be positive, got {u_probe}")

    rho = limit_rho(spec)
    limit_sample = sample_fiiss(
        spec.xi_alpha,
        rho,
        u_probe,
        n,
        step=grid_step,
        n_y=n_y,
        seed=seed,
        threads=threads,
    )
    distances = np.empty(t_grid.size)
    samples: dict = {"J": limit_sample}
    for i, t in enumerate(t_grid):
        y = scaled_marginal_samples(
            spec, float(t), u_probe, n, seed, base_index=(i + 1) * n, threads=threads
        )
        distances[i] = ks_statistic(y, limit_sample)
        samples[float(t)] = y
    report = ConvergenceReport(t_grid=t_grid, distances=distances, statistic="ks")
    return (report, samples) if return_samples else report


def shot_noise_moment_check(
    alpha: float,
    rho: float,
    l_max: int,
    t_grid,
    n: int,
    seed: SeedSpec,
    threads: int | None = None,
    return_samples: bool = False,
):
    """Empirical moments of the scaled renewal shot noise vs the limit.

    The shot response is the pure power h(x) = x**rho, so the scaling
    factor is exactly t**(-alpha-rho) and the limit moments are the
    closed-form J moments at u = 1.  With rho = 0 the scaled shot noise
    is just t**(-alpha) * nu(t).

    Args:
        alpha: interarrival tail index.
        rho: power exponent, in (-alpha, inf).
        l_max: highest moment order to report.
        t_grid: increasing scales, all >= 1.
        n: replicates per scale (at least 2).
        seed: master seed; scales use disjoint replicate blocks.
        threads: worker count.
        return_samples: also return the raw scaled samples per scale.

    Returns:
        MomentReports ordered by scale then moment order; with
        return_samples, a (reports, samples) pair where samples maps each
        scale to its array.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not rho > -alpha:
        raise ValueError(f"rho must exceed -alpha = {-alpha}, got {rho}")
    if l_max < 1:
        raise ValueError(f"l_max must be >= 1, got {l_max}")
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing")
    if np.any(t_grid < 1.0):
        raise ValueError("scales below 1 are outside the exact power-law regime")

    law = ParetoAlpha(alpha)
    reports = []
    samples_by_scale: dict[float, np.ndarray] = {}
    for i, t in enumerate(t_grid):
        t = float(t)
        scale = t ** (-alpha - rho)

        def one(r: int, t=t, scale=scale, base=i * n) -> float:
            path = simulate_walk(law, t, seed.child(base + r))
            m = first_passage(path, t)
            ages = t - path.arrivals[:m]
            return scale * float(np.sum(ages**rho))

        samples = map_indexed(one, n, threads)
        samples_by_scale[t] = samples
        for l in range(1, l_max + 1):
            est, se = empirical_moment(samples, l)
            reports.append(
                MomentReport(
                    label="scaled_shot_noise",
                    l=l,
                    empirical=est,
                    std_error=se,
                    theoretical=fiiss_moment_closed_form(alpha, rho, l, 1.0),
                    n_replicates=int(n),
                    t_scale=t,
                )
            )
    return (reports, samples_by_scale) if return_samples else reports
