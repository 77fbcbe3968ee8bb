"""Reproducible samplers for heavy-tailed and one-sided stable inputs.

Provides the parametric tail families used for interarrival times and
service/amplitude variables, plus a one-sided alpha-stable increment
sampler normalized so that the subordinator built from it has Laplace
exponent Gamma(1-alpha) * s**alpha.

All sampling is driven by :class:`SeedSpec`, which derives counter-based
generator streams from (master_seed, replicate_index, stream role).  Two
calls with the same SeedSpec produce bit-identical draws regardless of
execution order or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "TailLaw",
    "ParetoAlpha",
    "ParetoRho",
    "LogTail",
    "Constant",
    "LogNormalAmp",
    "SeedSpec",
    "STREAM_WALK",
    "STREAM_ETA",
    "STREAM_SUBORDINATOR",
    "STREAM_TAIL",
    "sample_tail",
    "sample_stable_increment",
    "stable_increments",
]

# Stream roles: keep walk increments, response draws, and subordinator
# increments on disjoint substreams of the same replicate.
STREAM_WALK = 0
STREAM_ETA = 1
STREAM_SUBORDINATOR = 2
STREAM_TAIL = 3

_MAX_FLOAT = float(np.finfo(np.float64).max)
_TINY_FLOAT = float(np.finfo(np.float64).tiny)
# Largest exponent with exp(x) still finite in double precision.
_MAX_EXP = 709.0


def _open_uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws from the open interval (0, 1).

    Uses the dyadic lattice k / 2**53 with k >= 1 so inverse survival
    images are finite and strictly positive for every law.
    """
    return rng.integers(1, 1 << 53, size=n) * (1.0 / (1 << 53))


def _as_float_array(t) -> np.ndarray:
    return np.asarray(t, dtype=np.float64)


class TailLaw:
    """Base class for the parametric survival-function families.

    Subclasses implement the exact survival function and its inverse;
    sampling is always inverse-CDF so empirical tails match the analytic
    ones to Monte Carlo accuracy.
    """

    def survival(self, t):
        """P{draw > t}, evaluated exactly; accepts scalars or arrays."""
        raise NotImplementedError

    def inverse_survival(self, q):
        """The t with survival(t) = q, for q in (0, 1]; vectorized."""
        raise NotImplementedError

    def mean(self) -> float:
        """Expected value; math.inf when the law has no first moment."""
        raise NotImplementedError

    def variance(self) -> float:
        """Variance; math.inf when undefined."""
        raise NotImplementedError


@dataclass(frozen=True)
class ParetoAlpha(TailLaw):
    """Survival t**(-alpha) for t >= 1, used for interarrival times."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    def survival(self, t):
        # max(t, 1) folds the t < 1 branch (survival 1) into one power.
        return _as_float_array(np.maximum(t, 1.0)) ** (-self.alpha)

    def inverse_survival(self, q):
        return _as_float_array(q) ** (-1.0 / self.alpha)

    def mean(self) -> float:
        return math.inf

    def variance(self) -> float:
        return math.inf


@dataclass(frozen=True)
class ParetoRho(TailLaw):
    """Survival t**rho for t >= 1 with rho in (-1, 0); service times."""

    rho: float

    def __post_init__(self):
        if not -1.0 < self.rho < 0.0:
            raise ValueError(f"rho must be in (-1, 0), got {self.rho}")

    def survival(self, t):
        return _as_float_array(np.maximum(t, 1.0)) ** self.rho

    def inverse_survival(self, q):
        return _as_float_array(q) ** (1.0 / self.rho)

    def mean(self) -> float:
        return math.inf

    def variance(self) -> float:
        return math.inf


@dataclass(frozen=True)
class LogTail(TailLaw):
    """Survival 1 / (1 + ln(1 + t)), an index-0 regularly varying tail."""

    def survival(self, t):
        return 1.0 / (1.0 + np.log1p(np.maximum(_as_float_array(t), 0.0)))

    def inverse_survival(self, q):
        # exp(1/q - 1) overflows for q < ~1/710; clamp the exponent so the
        # draw saturates at the largest finite double instead.
        expo = np.minimum(1.0 / _as_float_array(q) - 1.0, _MAX_EXP)
        return np.minimum(np.expm1(expo), _MAX_FLOAT)

    def mean(self) -> float:
        return math.inf

    def variance(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Constant(TailLaw):
    """Degenerate law at c > 0."""

    c: float

    def __post_init__(self):
        if not self.c > 0.0:
            raise ValueError(f"c must be positive, got {self.c}")

    def survival(self, t):
        return np.where(_as_float_array(t) < self.c, 1.0, 0.0)

    def inverse_survival(self, q):
        return np.full_like(_as_float_array(q), self.c)

    def mean(self) -> float:
        return self.c

    def variance(self) -> float:
        return 0.0


@dataclass(frozen=True)
class LogNormalAmp(TailLaw):
    """Log-normal amplitude law; every moment is finite."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def survival(self, t):
        t = _as_float_array(t)
        z = (np.log(np.maximum(t, _TINY_FLOAT)) - self.mu) / self.sigma
        return np.where(t <= 0.0, 1.0, 1.0 - ndtr(z))

    def inverse_survival(self, q):
        # Phi^{-1}(1 - q) == -Phi^{-1}(q), which keeps precision for small q.
        return np.exp(self.mu - self.sigma * ndtri(_as_float_array(q)))

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def variance(self) -> float:
        s2 = self.sigma**2
        return math.expm1(s2) * math.exp(2.0 * self.mu + s2)


@dataclass(frozen=True)
class SeedSpec:
    """Addresses one replicate's random streams.

    The derived streams are a pure function of (master_seed,
    replicate_index, stream), implemented with counter-based Philox
    generators, so replicates can be simulated in any order or on any
    number of workers with identical results.
    """

    master_seed: int
    replicate_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 1 << 64:
            raise ValueError(
                f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}"
            )
        if int(self.replicate_index) < 0:
            raise ValueError(
                f"replicate_index must be non-negative, got {self.replicate_index}"
            )

    def child(self, replicate_index: int) -> "SeedSpec":
        """The SeedSpec for another replicate under the same master seed."""
        return SeedSpec(self.master_seed, replicate_index)

    def generator(self, *stream: int) -> np.random.Generator:
        """A fresh generator for the given stream role of this replicate."""
        seq = np.random.SeedSequence(
            int(self.master_seed),
            spawn_key=(int(self.replicate_index), *(int(s) for s in stream)),
        )
        return np.random.Generator(np.random.Philox(seq))


def sample_tail(law: TailLaw, seed: SeedSpec, n: int) -> np.ndarray:
    """Draw n i.i.d. values from a tail law by exact inverse CDF.

    Args:
        law: the tail family to sample from.
        seed: replicate seed; draws land on the STREAM_TAIL substream.
        n: number of draws, at least 1.

    Returns:
        Array of n strictly positive draws, deterministic given seed.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = seed.generator(STREAM_TAIL)
    return law.inverse_survival(_open_uniforms(rng, n))


def _kanter(rng: np.random.Generator, alpha: float, n: int) -> np.ndarray:
    """Standard one-sided stable draws with E exp(-s X) = exp(-s**alpha)."""
    u = _open_uniforms(rng, n) * math.pi
    e = np.maximum(rng.standard_exponential(n), _TINY_FLOAT)
    frac = (1.0 - alpha) / alpha
    a = (
        np.sin(alpha * u) ** (alpha / (1.0 - alpha))
        * np.sin((1.0 - alpha) * u)
        / np.sin(u) ** (1.0 / (1.0 - alpha))
    )
    # Clamp the measure-zero overflow edge so downstream cumsums stay finite.
    return np.minimum((a / e) ** frac, _MAX_FLOAT)


def stable_increments(
    alpha: float, dt: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n increments of the subordinator over time windows of length dt.

    Each draw has Laplace transform exp(-dt * Gamma(1-alpha) * s**alpha).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if dt < 0.0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    if dt == 0.0:
        return np.zeros(n)
    scale = (dt * math.gamma(1.0 - alpha)) ** (1.0 / alpha)
    return np.minimum(scale * _kanter(rng, alpha, n), _MAX_FLOAT)


def sample_stable_increment(alpha: float, dt: float, seed: SeedSpec) -> float:
    """One subordinator increment over a window of length dt.

    Uses the Kanter construction (uniform on (0, pi) plus a unit
    exponential), which is exact in distribution and O(1) per draw.
    Returns 0.0 exactly when dt == 0.
    """
    rng = seed.generator(STREAM_SUBORDINATOR)
    return float(stable_increments(alpha, dt, 1, rng)[0])
