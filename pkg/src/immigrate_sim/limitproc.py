"""The stable subordinator, its generalized inverse, and the limit integral.

The limit process is the fractionally integrated inverse stable
subordinator J(u) = integral over [0, u] of (u - y)**rho dWinv(y), where
Winv is the generalized inverse Winv(y) = inf{t : W(t) > y} of an
alpha-stable subordinator W with Laplace exponent Gamma(1-alpha) *
s**alpha.  Paths are simulated by exact increments on a uniform time
grid; the integral is a left-point Stieltjes sum on a uniform y-grid, so
the rho < 0 integrand is never evaluated at its singularity y = u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import map_indexed
from .heavytail_rng import STREAM_SUBORDINATOR, SeedSpec, stable_increments

__all__ = [
    "StablePath",
    "InversePath",
    "simulate_subordinator",
    "invert_path",
    "fiiss",
    "fiiss_moment_closed_form",
    "sample_fiiss",
]


@dataclass(frozen=True, eq=False)
class StablePath:
    """A grid-sampled subordinator path: values[i] = W(i * step)."""

    step: float
    values: np.ndarray
    alpha: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if not self.step > 0.0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if vals.size < 2 or vals[0] != 0.0:
            raise ValueError("values must start at W(0) = 0 and contain an increment")
        if np.any(np.diff(vals) < 0.0):
            raise ValueError("subordinator values must be nondecreasing")

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(self.values.size)


@dataclass(frozen=True, eq=False)
class InversePath:
    """Winv on a uniform y-grid, computed with strict inequality."""

    y_grid: np.ndarray
    values: np.ndarray
    alpha: float


def _mean_inverse(alpha: float, y: float) -> float:
    # E Winv(y) = y**alpha / (Gamma(1-alpha) * Gamma(1+alpha)); used only
    # to size simulation blocks.
    return y**alpha / (math.gamma(1.0 - alpha) * math.gamma(1.0 + alpha))


def simulate_subordinator(
    alpha: float, y_max: float, step: float, seed: SeedSpec
) -> StablePath:
    """Simulate W on the grid {0, step, 2 step, ...} until it exceeds y_max.

    Args:
        alpha: stability index in (0, 1).
        y_max: level the path must pass; exactly one overshooting point is
            kept.
        step: time-grid spacing.
        seed: replicate seed; increments come from the subordinator
            substream.

    Returns:
        StablePath whose last value is the first grid value > y_max.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not step > 0.0:
        raise ValueError(f"step must be positive, got {step}")
    if not y_max > 0.0:
        raise ValueError(f"y_max must be positive, got {y_max}")
    rng = seed.generator(STREAM_SUBORDINATOR)
    expected = _mean_inverse(alpha, y_max) / step
    block = int(1.6 * expected) + 64
    extend = max(64, int(0.5 * expected))
    parts = []
    total = 0.0
    while total <= y_max:
        inc = stable_increments(alpha, step, block, rng)
        sums = np.cumsum(inc) + total
        parts.append(sums)
        total = float(sums[-1])
        block = extend
    values = np.concatenate([[0.0], *parts])
    stop = int(np.searchsorted(values, y_max, side="right"))
    return StablePath(step=float(step), values=values[: stop + 1], alpha=float(alpha))


def invert_path(path: StablePath, u_max: float, n_y: int) -> InversePath:
    """Generalized inverse of a path on a uniform y-grid over [0, u_max].

    For each grid y the value is the smallest grid time with W > y
    (strict inequality), which biases Winv upward by at most one time
    step.

    Raises:
        ValueError: if the path does not exceed u_max (too short to
            invert there).
    """
    if not u_max > 0.0:
        raise ValueError(f"u_max must be positive, got {u_max}")
    if n_y < 1:
        raise ValueError(f"n_y must be >= 1, got {n_y}")
    if not path.values[-1] > u_max:
        raise ValueError(
            f"path reaches only {path.values[-1]}, cannot invert up to {u_max}"
        )
    y_grid = np.linspace(0.0, u_max, n_y + 1)
    idx = np.searchsorted(path.values, y_grid, side="right")
    return InversePath(y_grid=y_grid, values=path.step * idx, alpha=path.alpha)


def _fiiss_from_grid(
    y_grid: np.ndarray, inv_values: np.ndarray, rho: float, u: float
) -> float:
    # Left-point cell sum plus the atom carried by the grid inverse at
    # y = 0 (the discretized inverse starts at one time step, not 0, and
    # the integral runs over the closed interval [0, u]); with rho = 0
    # the whole expression telescopes to the inverse value at u exactly.
    left = y_grid[:-1]
    mask = left < u
    weights = (u - left[mask]) ** rho
    return float(
        u**rho * inv_values[0] + np.dot(weights, np.diff(inv_values)[mask])
    )


def fiiss(inverse: InversePath, rho: float, u: float) -> float:
    """The fractional integral J(u) of one inverse path.

    Args:
        inverse: grid inverse of a subordinator path.
        rho: integration exponent; must exceed -alpha, below which the
            limit process has almost surely locally unbounded paths.
        u: evaluation point in (0, max of the y-grid].

    Returns:
        J(u) as a float.
    """
    if not rho > -inverse.alpha:
        raise ValueError(
            f"rho must exceed -alpha = {-inverse.alpha} (locally unbounded "
            f"trajectories below), got {rho}"
        )
    u_max = float(inverse.y_grid[-1])
    if not 0.0 < u <= u_max:
        raise ValueError(f"u must be in (0, {u_max}], got {u}")
    return _fiiss_from_grid(inverse.y_grid, inverse.values, rho, u)


def fiiss_moment_closed_form(alpha: float, rho: float, l: int, u: float) -> float:
    """Closed-form l-th moment of J(u).

    E J(u)**l = u**(l (alpha+rho)) * l! / Gamma(1-alpha)**l *
    prod_{j=1..l} Gamma(1 + rho + (j-1)(alpha+rho)) / Gamma(j (alpha+rho) + 1).

    The u-power follows from self-similarity of the inverse subordinator;
    the product is the u = 1 value.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not rho > -alpha:
        raise ValueError(f"rho must exceed -alpha = {-alpha}, got {rho}")
    if l < 1:
        raise ValueError(f"l must be a positive integer, got {l}")
    if not u > 0.0:
        raise ValueError(f"u must be positive, got {u}")
    s = alpha + rho
    value = math.factorial(l) / math.gamma(1.0 - alpha) ** l
    for j in range(1, l + 1):
        num = 1.0 + rho + (j - 1) * s
        den = j * s + 1.0
        assert num > 0.0 and den > 0.0, "gamma arguments must stay positive"
        value *= math.gamma(num) / math.gamma(den)
    return u ** (l * s) * value


def sample_fiiss(
    alpha: float,
    rho: float,
    u: float,
    n_paths: int,
    step: float = 1e-4,
    n_y: int = 10**4,
    seed: SeedSpec = SeedSpec(0),
    threads: int | None = None,
    base_index: int = 0,
) -> np.ndarray:
    """Monte Carlo sample of J(u) over independent subordinator paths.

    Path i draws from the subordinator substream of replicate
    base_index + i under the master seed, so samples are reproducible
    and mergeable independently of worker count.
    """
    if not rho > -alpha:
        raise ValueError(f"rho must exceed -alpha = {-alpha}, got {rho}")
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    y_grid = np.linspace(0.0, u, n_y + 1)
    left = y_grid[:-1]
    weights = (u - left) ** rho  # full-grid case: every left endpoint < u
    atom_weight = u**rho

    def one_path(i: int) -> float:
        path = simulate_subordinator(
            alpha, u, step, seed.child(base_index + i)
        )
        idx = np.searchsorted(path.values, y_grid, side="right")
        inv = path.step * idx
        return float(atom_weight * inv[0] + np.dot(weights, np.diff(inv)))

    return map_indexed(one_path, n_paths, threads)
