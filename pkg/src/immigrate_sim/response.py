"""Parametric response-process families with analytic mean and variance.

Each family describes the pair (X, xi): the response process X emitted at
a renewal epoch and the interarrival xi it may depend on.  Interarrivals
are always ParetoAlpha(xi_alpha); the families differ in X:

- QueueIndicator: X(t) = 1{eta > t}, a busy-server indicator with service
  time eta, optionally comonotone with xi.
- Amplitude: X(t) = eta * f(t) with f(t) = f_scale * (1 + t)**f_rho and an
  amplitude eta that has all moments finite.
- Deterministic: X(t) = h(t) = h_scale * (1 + t)**h_rho almost surely.

The (1 + t) form avoids the power-law singularity at t = 0 while keeping
exact regular variation with the stated index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .heavytail_rng import (
    STREAM_ETA,
    Constant,
    LogNormalAmp,
    LogTail,
    ParetoAlpha,
    ParetoRho,
    SeedSpec,
    TailLaw,
    _open_uniforms,
)

__all__ = [
    "QueueIndicator",
    "Amplitude",
    "Deterministic",
    "ResponseSpec",
    "QueueResponse",
    "AmplitudeResponse",
    "DeterministicResponse",
    "mean_h",
    "variance_v",
    "draw_response",
    "limit_rho",
    "paired_etas",
]

DEPENDENCE_MODES = ("independent", "comonotone")


@dataclass(frozen=True)
class QueueIndicator:
    """Busy-server indicator response 1{eta > t}."""

    eta_law: TailLaw
    dependence: str = "independent"


@dataclass(frozen=True)
class Amplitude:
    """Random-amplitude response eta * f_scale * (1 + t)**f_rho."""

    eta_law: TailLaw
    f_rho: float
    f_scale: float = 1.0


@dataclass(frozen=True)
class Deterministic:
    """Deterministic response h_scale * (1 + t)**h_rho."""

    h_rho: float
    h_scale: float = 1.0


Model = Union[QueueIndicator, Amplitude, Deterministic]


@dataclass(frozen=True)
class ResponseSpec:
    """A response model together with the interarrival tail index."""

    model: Model
    xi_alpha: float

    def __post_init__(self):
        a = self.xi_alpha
        if not 0.0 < a < 1.0:
            raise ValueError(f"xi_alpha must be in (0, 1), got {a}")
        m = self.model
        if isinstance(m, QueueIndicator):
            if m.dependence not in DEPENDENCE_MODES:
                raise ValueError(
                    f"dependence must be one of {DEPENDENCE_MODES}, got {m.dependence!r}"
                )
            # The indicator mean h(t) = P{eta > t} must be regularly varying
            # with index in (-alpha, 0]; only these two laws qualify.
            if isinstance(m.eta_law, ParetoRho):
                if m.eta_law.rho <= -a:
                    raise ValueError(
                        f"eta_law rho must exceed -xi_alpha = {-a}, got {m.eta_law.rho}"
                    )
            elif not isinstance(m.eta_law, LogTail):
                raise ValueError(
                    "eta_law for QueueIndicator must be ParetoRho or LogTail, "
                    f"got {type(m.eta_law).__name__}"
                )
        elif isinstance(m, Amplitude):
            if not isinstance(m.eta_law, (LogNormalAmp, Constant)):
                # Amplitude needs every moment of eta finite with nonzero mean.
                raise ValueError(
                    "eta_law for Amplitude must be LogNormalAmp or Constant, "
                    f"got {type(m.eta_law).__name__}"
                )
            if not m.f_rho > -a:
                raise ValueError(f"f_rho must exceed -xi_alpha = {-a}, got {m.f_rho}")
            if not m.f_scale > 0.0:
                raise ValueError(f"f_scale must be positive, got {m.f_scale}")
        elif isinstance(m, Deterministic):
            if not m.h_rho > -a:
                raise ValueError(f"h_rho must exceed -xi_alpha = {-a}, got {m.h_rho}")
            if not m.h_scale > 0.0:
                raise ValueError(f"h_scale must be positive, got {m.h_scale}")
        else:
            raise ValueError(f"unknown response model {type(m).__name__}")


def limit_rho(spec: ResponseSpec) -> float:
    """The regular-variation index of h(t), which also indexes the limit."""
    m = spec.model
    if isinstance(m, QueueIndicator):
        return m.eta_law.rho if isinstance(m.eta_law, ParetoRho) else 0.0
    if isinstance(m, Amplitude):
        return m.f_rho
    return m.h_rho


def mean_h(spec: ResponseSpec, t):
    """h(t) = E X(t), evaluated analytically; vectorized over t >= 0."""
    m = spec.model
    t = np.asarray(t, dtype=np.float64)
    if isinstance(m, QueueIndicator):
        return m.eta_law.survival(t)
    if isinstance(m, Amplitude):
        return m.eta_law.mean() * m.f_scale * (1.0 + t) ** m.f_rho
    return m.h_scale * (1.0 + t) ** m.h_rho


def variance_v(spec: ResponseSpec, t):
    """v(t) = Var X(t), evaluated analytically; vectorized over t >= 0."""
    m = spec.model
    t = np.asarray(t, dtype=np.float64)
    if isinstance(m, QueueIndicator):
        h = m.eta_law.survival(t)
        return h * (1.0 - h)
    if isinstance(m, Amplitude):
        return m.eta_law.variance() * (m.f_scale * (1.0 + t) ** m.f_rho) ** 2
    return np.zeros_like(t)


@dataclass(frozen=True)
class QueueResponse:
    """Realized indicator t -> 1{eta > t}; right-continuous step down."""

    eta: float

    def __call__(self, t):
        return np.where(np.asarray(t, dtype=np.float64) < self.eta, 1.0, 0.0)


@dataclass(frozen=True)
class AmplitudeResponse:
    """Realized amplitude response t -> eta * f_scale * (1 + t)**f_rho."""

    eta: float
    f_rho: float
    f_scale: float = 1.0

    def __call__(self, t):
        return self.eta * self.f_scale * (1.0 + np.asarray(t, dtype=np.float64)) ** self.f_rho


@dataclass(frozen=True)
class DeterministicResponse:
    """Realized deterministic response, equal to its own mean."""

    h_rho: float
    h_scale: float = 1.0

    def __call__(self, t):
        return self.h_scale * (1.0 + np.asarray(t, dtype=np.float64)) ** self.h_rho


def _comonotone_etas(spec: ResponseSpec, xi: np.ndarray) -> np.ndarray:
    # Same uniform through both inverse survivals: eta = Q_eta(F_xi(xi)).
    q = ParetoAlpha(spec.xi_alpha).survival(xi)
    return spec.model.eta_law.inverse_survival(q)


def paired_etas(spec: ResponseSpec, xi: np.ndarray, rng: np.random.Generator):
    """Draw the eta for each paired interarrival, vectorized.

    Under comonotone dependence the eta is a deterministic increasing
    function of its own xi; under independence it uses fresh uniforms from
    rng.  Returns None for the Deterministic model (no randomness).
    """
    m = spec.model
    if isinstance(m, Deterministic):
        return None
    if isinstance(m, QueueIndicator) and m.dependence == "comonotone":
        return _comonotone_etas(spec, np.asarray(xi, dtype=np.float64))
    return m.eta_law.inverse_survival(_open_uniforms(rng, len(xi)))


def draw_response(spec: ResponseSpec, xi: float, seed: SeedSpec):
    """Realize one response paired with its interarrival.

    Args:
        spec: response family.
        xi: the paired interarrival value.
        seed: replicate seed; independent draws use the eta substream.

    Returns:
        (handle, xi): an evaluable t -> X(t) realization and the paired
        interarrival it belongs to.
    """
    m = spec.model
    if isinstance(m, Deterministic):
        return DeterministicResponse(m.h_rho, m.h_scale), xi
    if isinstance(m, QueueIndicator):
        if m.dependence == "comonotone":
            eta = float(_comonotone_etas(spec, np.asarray([xi]))[0])
        else:
            rng = seed.generator(STREAM_ETA)
            eta = float(m.eta_law.inverse_survival(_open_uniforms(rng, 1))[0])
        return QueueResponse(eta), xi
    rng = seed.generator(STREAM_ETA)
    eta = float(m.eta_law.inverse_survival(_open_uniforms(rng, 1))[0])
    return AmplitudeResponse(eta, m.f_rho, m.f_scale), xi
