"""Simulation and verification of random processes with immigration.

The library simulates processes of the form Y(u) = sum over k of
X_{k+1}(u - S_k) for S_k <= u, where the S_k are renewal epochs of a
random walk with heavy-tailed increments and each X is a response process
started at its epoch.  When the interarrival tail index is alpha in
(0, 1) and the response mean decays like a power of index rho, the
scaled process converges to a fractional integral of the inverse stable
subordinator; this package samples both sides and checks marginals,
moments, and the martingale/shot-noise decomposition at desk scale.

Modules:
  heavytail_rng  tail-law samplers, stable increments, seeding
  renewal        random walk paths, first passage, shot noise
  response       queue / amplitude / deterministic response families
  immigration    the scaled process and its decomposition
  limitproc      the limit process: subordinator, inverse, integral
  stats          Monte Carlo checks (moments, KS distances)
  cli            config-driven experiments with CSV/JSON/PNG output
"""

from .heavytail_rng import (
    Constant,
    LogNormalAmp,
    LogTail,
    ParetoAlpha,
    ParetoRho,
    SeedSpec,
    TailLaw,
    sample_stable_increment,
    sample_tail,
    stable_increments,
)
from .immigration import (
    ProcessSample,
    martingale_sup_diagnostic,
    scaling_factor,
    simulate_Y,
)
from .limitproc import (
    InversePath,
    StablePath,
    fiiss,
    fiiss_moment_closed_form,
    invert_path,
    sample_fiiss,
    simulate_subordinator,
)
from .renewal import RenewalPath, first_passage, shot_noise, simulate_walk
from .response import (
    Amplitude,
    Deterministic,
    QueueIndicator,
    ResponseSpec,
    draw_response,
    limit_rho,
    mean_h,
    variance_v,
)
from .stats import (
    ConvergenceReport,
    MomentReport,
    empirical_moment,
    flt_marginal_check,
    ks_statistic,
    shot_noise_moment_check,
)

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "Constant",
    "ConvergenceReport",
    "Deterministic",
    "InversePath",
    "LogNormalAmp",
    "LogTail",
    "MomentReport",
    "ParetoAlpha",
    "ParetoRho",
    "ProcessSample",
    "QueueIndicator",
    "RenewalPath",
    "ResponseSpec",
    "SeedSpec",
    "StablePath",
    "TailLaw",
    "draw_response",
    "empirical_moment",
    "fiiss",
    "fiiss_moment_closed_form",
    "first_passage",
    "flt_marginal_check",
    "invert_path",
    "ks_statistic",
    "limit_rho",
    "martingale_sup_diagnostic",
    "mean_h",
    "sample_fiiss",
    "sample_stable_increment",
    "sample_tail",
    "scaling_factor",
    "shot_noise",
    "shot_noise_moment_check",
    "simulate_Y",
    "simulate_subordinator",
    "simulate_walk",
    "stable_increments",
    "variance_v",
    "__version__",
]
