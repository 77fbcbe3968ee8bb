"""Command line entry point.

Subcommands:
  run <config> [--key value ...]   execute an experiment, write outputs
  print-config [experiment]        emit a documented default config file
  selftest                         run the fast exact checks only

Exit status: 0 when every gated check passes, 2 when the experiment ran
but a check failed, 1 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import report
from .config import (
    EXPERIMENTS,
    KEYS,
    ConfigError,
    config_from_pairs,
    default_config,
    format_config,
    read_config_file,
)
from .experiments import run_experiment

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="immigrate-sim",
        description=(
            "Simulate random processes with immigration under heavy-tailed "
            "interarrivals and check their scaled marginals, moments, and "
            "decomposition against the limit process."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config", help="path to a flat key = value config file")
    for key in KEYS:
        run_p.add_argument(
            "--" + key.name.replace("_", "-"),
            dest=key.name,
            metavar="VALUE",
            help=key.doc,
        )

    print_p = sub.add_parser("print-config", help="print a default config file")
    print_p.add_argument(
        "experiment",
        nargs="?",
        default="flt_queue",
        choices=EXPERIMENTS,
        help="experiment whose defaults to print",
    )

    sub.add_parser("selftest", help="run the exact fixture checks (fast)")
    return parser


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _summary_line(entry: dict) -> str:
    verdict = (
        "info"
        if entry.get("pass") is None
        else ("PASS" if entry["pass"] else "FAIL")
    )
    parts = [
        f"{k}={_fmt(v)}"
        for k, v in entry.items()
        if k not in ("name", "pass", "values")
    ]
    if "values" in entry:
        parts.append("values=[" + ", ".join(f"{v:.6g}" for v in entry["values"]) + "]")
    detail = " ".join(parts)
    return f"[{verdict:>4}] {entry['name']}" + (f": {detail}" if detail else "")


def _run(args: argparse.Namespace) -> int:
    try:
        pairs = read_config_file(args.config)
        overrides = {
            key.name: value
            for key in KEYS
            if (value := getattr(args, key.name)) is not None
        }
        cfg = config_from_pairs(pairs, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        result = run_experiment(cfg, out_dir)
        summary_path = report.write_json_summary(
            out_dir / "summary.json",
            cfg.experiment,
            cfg.to_dict(),
            result.reports,
            result.passed,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # the run contract maps any failure to status 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    for entry in result.reports:
        print(_summary_line(entry))
    for path in (*result.files, str(summary_path)):
        print(f"wrote {path}")
    print(f"{cfg.experiment}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 2


def _selftest_checks():
    from ..heavytail_rng import Constant, ParetoAlpha, ParetoRho, SeedSpec, sample_tail
    from ..limitproc import StablePath, fiiss, fiiss_moment_closed_form, invert_path
    from ..renewal import RenewalPath, first_passage, shot_noise
    from ..response import QueueResponse
    from ..stats import empirical_moment, ks_statistic

    fixture = RenewalPath.from_increments((1.0, 2.5, 3.0), horizon=6.0)

    def pareto_quantiles():
        assert float(ParetoAlpha(0.5).inverse_survival(0.5)) == 4.0
        assert float(ParetoRho(-0.5).survival(4.0)) == 0.5

    def first_passage_fixture():
        assert first_passage(fixture, 3.5) == 3
        assert first_passage(fixture, 0.0) == 1

    def shot_noise_fixture():
        assert shot_noise(fixture, lambda x: np.ones_like(x), 6.0) == 3.0
        assert shot_noise(fixture, lambda x: x, 6.0) == 13.5

    def queue_response_steps():
        x = QueueResponse(eta=5.0)
        assert np.array_equal(x(np.array([3.0, 5.0, 7.0])), [1.0, 0.0, 0.0])

    def constant_law():
        law = Constant(2.0)
        assert float(law.survival(1.9)) == 1.0
        assert float(law.survival(2.0)) == 0.0
        assert law.mean() == 2.0 and law.variance() == 0.0

    def ks_oracle():
        assert ks_statistic((1.0, 2.0), (1.5, 2.5)) == 0.5

    def moment_oracle():
        est, se = empirical_moment([1.0, 2.0, 4.0], 1)
        assert math.isclose(est, 7.0 / 3.0, rel_tol=1e-12)
        assert math.isclose(se, math.sqrt(7.0) / 3.0, rel_tol=1e-12)

    def fiiss_flat_exponent_identity():
        path = StablePath(step=0.25, values=np.array([0.0, 0.3, 0.9, 2.0]), alpha=0.5)
        inv = invert_path(path, u_max=1.0, n_y=4)
        assert fiiss(inv, 0.0, 1.0) == float(inv.values[-1]) == 0.75

    def closed_form_pins():
        assert math.isclose(
            fiiss_moment_closed_form(0.5, 0.0, 1, 1.0), 2.0 / math.pi, rel_tol=1e-12
        )
        assert fiiss_moment_closed_form(0.5, 0.5, 1, 1.0) == 0.5
        assert math.isclose(
            fiiss_moment_closed_form(0.6, 0.2, 1, 2.0),
            2.0**0.8 * fiiss_moment_closed_form(0.6, 0.2, 1, 1.0),
            rel_tol=1e-12,
        )

    def parameter_validation():
        for bad in (lambda: ParetoAlpha(1.0), lambda: ParetoRho(0.0),
                    lambda: SeedSpec(-1)):
            try:
                bad()
            except ValueError:
                continue
            raise AssertionError("invalid parameters were accepted")

    def config_validation():
        for pairs, field in (
            ({"experiment": "fiiss_moments", "rho": "-0.5"}, "rho"),
            ({"experiment": "fiiss_moments", "replicates": "1"}, "replicates"),
        ):
            try:
                config_from_pairs(pairs)
            except ConfigError as exc:
                assert exc.field == field
                continue
            raise AssertionError(f"config with bad {field} was accepted")

    def sampling_determinism():
        law, seed = ParetoAlpha(0.7), SeedSpec(3, 5)
        assert np.array_equal(sample_tail(law, seed, 8), sample_tail(law, seed, 8))

    return [
        ("pareto quantiles", pareto_quantiles),
        ("first passage on fixture path", first_passage_fixture),
        ("shot noise hand sums", shot_noise_fixture),
        ("queue response steps", queue_response_steps),
        ("constant law", constant_law),
        ("two-sample KS oracle", ks_oracle),
        ("empirical moment oracle", moment_oracle),
        ("flat-exponent integral identity", fiiss_flat_exponent_identity),
        ("closed-form moment pins", closed_form_pins),
        ("parameter validation", parameter_validation),
        ("config validation", config_validation),
        ("sampling determinism", sampling_determinism),
    ]


def _selftest() -> int:
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:
            failures += 1
            print(f"[FAIL] {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"[ok] {name}")
    print(f"selftest: {'PASS' if failures == 0 else f'FAIL ({failures} checks)'}")
    return 0 if failures == 0 else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "print-config":
        print(format_config(default_config(args.experiment)))
        return 0
    if args.command == "selftest":
        return _selftest()
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
