"""Flat key = value experiment configuration.

Every experiment shares one parameter namespace, read from a text file of
`key = value` lines (blank lines and `#` comments ignored) and optionally
overridden per key on the command line.  Validation errors always name the
offending field so the CLI can report it and exit with status 1.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Callable

import numpy as np

from ..heavytail_rng import Constant, LogNormalAmp, LogTail, ParetoRho
from ..response import Amplitude, Deterministic, QueueIndicator, ResponseSpec

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "KEYS",
    "config_from_pairs",
    "default_config",
    "format_config",
    "read_config_file",
    "response_spec",
]

EXPERIMENTS = (
    "flt_queue",
    "flt_amplitude",
    "shot_noise_moments",
    "fiiss_moments",
    "martingale_diagnostic",
    "fiiss_sample",
)
MODELS = ("queue", "amplitude", "deterministic")
ETA_LAWS = ("pareto_rho", "log_tail", "constant", "lognormal")
DEPENDENCE_MODES = ("independent", "comonotone")


class ConfigError(ValueError):
    """Invalid configuration; carries the name of the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    # Accept scientific notation for counts (replicates = 1e5).
    try:
        return int(s)
    except ValueError:
        value = float(s)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {s!r}") from None
        return int(value)


def _parse_bool(s: str) -> bool:
    lowered = s.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _parse_grid(s: str) -> tuple[float, ...]:
    parts = [p.strip() for p in s.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(float(p) for p in parts)


def _parse_str(s: str) -> str:
    return s.strip()


@dataclass(frozen=True)
class _Key:
    name: str
    parse: Callable[[str], object]
    doc: str


KEYS: tuple[_Key, ...] = (
    _Key("experiment", _parse_str, f"one of: {', '.join(EXPERIMENTS)}"),
    _Key("alpha", _parse_float, "interarrival tail index, in (0, 1)"),
    _Key(
        "rho",
        _parse_float,
        "response power exponent, > -alpha; queue service tail when "
        "eta_law = pareto_rho",
    ),
    _Key("model", _parse_str, f"response family, one of: {', '.join(MODELS)}"),
    _Key(
        "eta_law",
        _parse_str,
        f"service/amplitude law, one of: {', '.join(ETA_LAWS)}",
    ),
    _Key("eta_c", _parse_float, "value of the constant eta law, > 0"),
    _Key("eta_mu", _parse_float, "log-mean of the lognormal eta law"),
    _Key("eta_sigma", _parse_float, "log-sd of the lognormal eta law, > 0"),
    _Key(
        "dependence",
        _parse_str,
        f"(xi, eta) coupling, one of: {', '.join(DEPENDENCE_MODES)}",
    ),
    _Key("f_rho", _parse_float, "amplitude shape exponent, > -alpha"),
    _Key("f_scale", _parse_float, "amplitude shape scale, > 0"),
    _Key("h_rho", _parse_float, "deterministic response exponent, > -alpha"),
    _Key("h_scale", _parse_float, "deterministic response scale, > 0"),
    _Key("t_grid", _parse_grid, "increasing positive scales, comma-separated"),
    _Key("u_grid", _parse_grid, "increasing positive locations, comma-separated"),
    _Key("u_probe", _parse_float, "single probe location for marginal checks, > 0"),
    _Key("replicates", _parse_int, "Monte Carlo sample size per scale, >= 2"),
    _Key("l_max", _parse_int, "highest moment order to check, >= 1"),
    _Key("seed", _parse_int, "master seed, unsigned 64-bit"),
    _Key("grid_step", _parse_float, "subordinator time step for limit samples, > 0"),
    _Key("n_y", _parse_int, "inverse-path grid size for limit samples, >= 1"),
    _Key("ks_threshold", _parse_float, "pass bound for marginal KS distance"),
    _Key("selfsim_threshold", _parse_float, "pass bound for self-similarity KS"),
    _Key(
        "moment_rel_tol",
        _parse_float,
        "relative moment tolerance; effective bound is max(3 SE, this)",
    ),
    _Key("out_dir", _parse_str, "output directory for CSV/JSON/PNG files"),
    _Key("dump_samples", _parse_bool, "also write raw per-replicate samples as CSV"),
    _Key("threads", _parse_int, "worker threads; 0 means machine default"),
)

_KEY_BY_NAME = {k.name: k for k in KEYS}

# Shared 40-point log-spaced default location grid on [0.1, 2].
_DEFAULT_U_GRID = tuple(float(x) for x in np.logspace(np.log10(0.1), np.log10(2.0), 40))

_BASE_DEFAULTS: dict[str, object] = {
    "alpha": 0.5,
    "rho": 0.0,
    "model": "deterministic",
    "eta_law": "constant",
    "eta_c": 1.0,
    "eta_mu": 0.0,
    "eta_sigma": 1.0,
    "dependence": "independent",
    "f_rho": 0.5,
    "f_scale": 1.0,
    "h_rho": 0.0,
    "h_scale": 1.0,
    "t_grid": (100.0, 1000.0, 10000.0),
    "u_grid": _DEFAULT_U_GRID,
    "u_probe": 1.0,
    "replicates": 10_000,
    "l_max": 3,
    "seed": 20260817,
    "grid_step": 1e-4,
    "n_y": 10_000,
    "ks_threshold": 0.05,
    "selfsim_threshold": 0.02,
    "moment_rel_tol": 0.05,
    "out_dir": "out",
    "dump_samples": False,
    "threads": 0,
}

_EXPERIMENT_DEFAULTS: dict[str, dict[str, object]] = {
    "flt_queue": {"alpha": 0.6, "rho": -0.3, "model": "queue", "eta_law": "pareto_rho"},
    "flt_amplitude": {"alpha": 0.5, "model": "amplitude", "eta_law": "lognormal"},
    "shot_noise_moments": {"l_max": 2},
    "fiiss_moments": {"replicates": 100_000},
    "martingale_diagnostic": {
        "alpha": 0.6,
        "rho": -0.2,
        "model": "queue",
        "eta_law": "pareto_rho",
        "replicates": 1_000,
    },
    "fiiss_sample": {"rho": 0.5, "u_probe": 2.0, "replicates": 100_000},
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    alpha: float
    rho: float
    model: str
    eta_law: str
    eta_c: float
    eta_mu: float
    eta_sigma: float
    dependence: str
    f_rho: float
    f_scale: float
    h_rho: float
    h_scale: float
    t_grid: tuple[float, ...]
    u_grid: tuple[float, ...]
    u_probe: float
    replicates: int
    l_max: int
    seed: int
    grid_step: float
    n_y: int
    ks_threshold: float
    selfsim_threshold: float
    moment_rel_tol: float
    out_dir: str
    dump_samples: bool
    threads: int

    def to_dict(self) -> dict:
        return {
            f.name: list(v) if isinstance(v := getattr(self, f.name), tuple) else v
            for f in fields(self)
        }


def _check_grid(name: str, grid: tuple[float, ...]) -> None:
    if any(x <= 0.0 for x in grid):
        raise ConfigError(name, "all entries must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError(name, "entries must be strictly increasing")


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Raise ConfigError naming the first offending field."""
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError(
            "experiment", f"unknown experiment {cfg.experiment!r}; "
            f"expected one of {', '.join(EXPERIMENTS)}"
        )
    if not 0.0 < cfg.alpha < 1.0:
        raise ConfigError("alpha", f"must be in (0, 1), got {cfg.alpha}")
    if cfg.rho <= -cfg.alpha:
        raise ConfigError(
            "rho",
            f"rho = {cfg.rho} with alpha = {cfg.alpha} puts the response in "
            "the locally-unbounded regime (the integrand blows up at the "
            "running endpoint); require rho > -alpha",
        )
    if cfg.replicates < 2:
        raise ConfigError(
            "replicates",
            f"need at least 2 (standard error is undefined), got {cfg.replicates}",
        )
    _check_grid("t_grid", cfg.t_grid)
    _check_grid("u_grid", cfg.u_grid)
    if not cfg.u_probe > 0.0:
        raise ConfigError("u_probe", f"must be positive, got {cfg.u_probe}")
    if cfg.l_max < 1:
        raise ConfigError("l_max", f"must be >= 1, got {cfg.l_max}")
    if not 0 <= cfg.seed < 1 << 64:
        raise ConfigError("seed", f"must be an unsigned 64-bit integer, got {cfg.seed}")
    if not cfg.grid_step > 0.0:
        raise ConfigError("grid_step", f"must be positive, got {cfg.grid_step}")
    if cfg.n_y < 1:
        raise ConfigError("n_y", f"must be >= 1, got {cfg.n_y}")
    for name in ("ks_threshold", "selfsim_threshold", "moment_rel_tol"):
        if not getattr(cfg, name) > 0.0:
            raise ConfigError(name, f"must be positive, got {getattr(cfg, name)}")
    if cfg.threads < 0:
        raise ConfigError("threads", f"must be >= 0, got {cfg.threads}")

    if cfg.model not in MODELS:
        raise ConfigError("model", f"expected one of {', '.join(MODELS)}")
    if cfg.eta_law not in ETA_LAWS:
        raise ConfigError("eta_law", f"expected one of {', '.join(ETA_LAWS)}")
    if cfg.dependence not in DEPENDENCE_MODES:
        raise ConfigError(
            "dependence", f"expected one of {', '.join(DEPENDENCE_MODES)}"
        )
    if cfg.experiment == "flt_queue" and cfg.model != "queue":
        raise ConfigError("model", "flt_queue requires model = queue")
    if cfg.experiment == "flt_amplitude" and cfg.model != "amplitude":
        raise ConfigError("model", "flt_amplitude requires model = amplitude")
    if cfg.model != "queue" and cfg.dependence != "independent":
        raise ConfigError(
            "dependence",
            "only the queue model couples (xi, eta); other models take "
            "dependence = independent",
        )
    if cfg.model == "queue":
        if cfg.eta_law not in ("pareto_rho", "log_tail"):
            raise ConfigError(
                "eta_law", "queue model takes pareto_rho or log_tail"
            )
        if cfg.eta_law == "pareto_rho" and not -1.0 < cfg.rho < 0.0:
            raise ConfigError(
                "rho", f"pareto_rho service law needs rho in (-1, 0), got {cfg.rho}"
            )
    if cfg.model == "amplitude":
        if cfg.eta_law not in ("lognormal", "constant"):
            raise ConfigError(
                "eta_law", "amplitude model takes lognormal or constant"
            )
        if cfg.f_rho <= -cfg.alpha:
            raise ConfigError(
                "f_rho", f"must exceed -alpha = {-cfg.alpha}, got {cfg.f_rho}"
            )
        if not cfg.f_scale > 0.0:
            raise ConfigError("f_scale", f"must be positive, got {cfg.f_scale}")
        if not cfg.eta_sigma > 0.0:
            raise ConfigError("eta_sigma", f"must be positive, got {cfg.eta_sigma}")
        if not cfg.eta_c > 0.0:
            raise ConfigError("eta_c", f"must be positive, got {cfg.eta_c}")
    if cfg.model == "deterministic":
        if cfg.h_rho <= -cfg.alpha:
            raise ConfigError(
                "h_rho", f"must exceed -alpha = {-cfg.alpha}, got {cfg.h_rho}"
            )
        if not cfg.h_scale > 0.0:
            raise ConfigError("h_scale", f"must be positive, got {cfg.h_scale}")
    return cfg


def default_config(experiment: str) -> ExperimentConfig:
    """The validated default configuration of one experiment."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            "experiment", f"unknown experiment {experiment!r}; "
            f"expected one of {', '.join(EXPERIMENTS)}"
        )
    values = dict(_BASE_DEFAULTS)
    values.update(_EXPERIMENT_DEFAULTS[experiment])
    return validate(ExperimentConfig(experiment=experiment, **values))


def read_config_file(path: str) -> dict[str, str]:
    """Raw key/value pairs from a flat config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from exc
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(
                "config", f"{path}:{lineno}: expected 'key = value', got {stripped!r}"
            )
        key = key.strip()
        if key in pairs:
            raise ConfigError(key, f"{path}:{lineno}: duplicate key")
        pairs[key] = value.strip()
    return pairs


def _parse_pairs(pairs: dict[str, str]) -> dict[str, object]:
    parsed: dict[str, object] = {}
    for name, raw in pairs.items():
        key = _KEY_BY_NAME.get(name)
        if key is None:
            raise ConfigError(name, "unknown configuration key")
        try:
            parsed[name] = key.parse(raw)
        except ValueError as exc:
            raise ConfigError(name, str(exc)) from exc
    return parsed


def config_from_pairs(
    file_pairs: dict[str, str], overrides: dict[str, str] | None = None
) -> ExperimentConfig:
    """Build and validate a config from file pairs plus CLI overrides.

    Defaults come from the resolved experiment (overrides win over the
    file when both name it), so a config file only needs the keys it
    changes.
    """
    parsed = _parse_pairs(file_pairs)
    parsed.update(_parse_pairs(overrides or {}))
    experiment = parsed.pop("experiment", None)
    if experiment is None:
        raise ConfigError("experiment", "missing; every config must name one")
    base = default_config(str(experiment))
    try:
        cfg = replace(base, **parsed)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from exc
    return validate(cfg)


def format_config(cfg: ExperimentConfig) -> str:
    """Render a config as a loadable file with one doc comment per key."""
    out = [f"# configuration for experiment: {cfg.experiment}", ""]
    for key in KEYS:
        value = getattr(cfg, key.name)
        if isinstance(value, tuple):
            text = ",".join(f"{v:.17g}" for v in value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = f"{value:.17g}"
        else:
            text = str(value)
        out.append(f"# {key.doc}")
        out.append(f"{key.name} = {text}")
        out.append("")
    return "\n".join(out)


def response_spec(cfg: ExperimentConfig) -> ResponseSpec:
    """The response family a model-driven experiment simulates."""
    if cfg.model == "queue":
        eta_law = ParetoRho(cfg.rho) if cfg.eta_law == "pareto_rho" else LogTail()
        model = QueueIndicator(eta_law=eta_law, dependence=cfg.dependence)
    elif cfg.model == "amplitude":
        eta_law = (
            LogNormalAmp(cfg.eta_mu, cfg.eta_sigma)
            if cfg.eta_law == "lognormal"
            else Constant(cfg.eta_c)
        )
        model = Amplitude(eta_law=eta_law, f_rho=cfg.f_rho, f_scale=cfg.f_scale)
    else:
        model = Deterministic(h_rho=cfg.h_rho, h_scale=cfg.h_scale)
    try:
        return ResponseSpec(model=model, xi_alpha=cfg.alpha)
    except ValueError as exc:
        raise ConfigError("model", str(exc)) from exc
