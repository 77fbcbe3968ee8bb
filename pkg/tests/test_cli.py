from __future__ import annotations

import json
import subprocess
import sys

import pytest

from immigrate_sim._parallel import resolve_threads
from immigrate_sim.cli.config import (
    EXPERIMENTS,
    ConfigError,
    config_from_pairs,
    default_config,
    format_config,
    read_config_file,
    response_spec,
)
from immigrate_sim.cli.main import main
from immigrate_sim.heavytail_rng import Constant, LogNormalAmp, LogTail, ParetoRho
from immigrate_sim.response import Amplitude, Deterministic, QueueIndicator


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_minimal_config_equals_defaults(tmp_path):
    path = _write(tmp_path, "c.txt", "experiment = fiiss_moments\n")
    cfg = config_from_pairs(read_config_file(path), {})
    assert cfg == default_config("fiiss_moments")


def test_config_error_fields(tmp_path):
    with pytest.raises(ConfigError) as err:
        config_from_pairs({"experiment": "flt_queue", "bogus": "1"}, {})
    assert err.value.field == "bogus"

    with pytest.raises(ConfigError) as err:
        config_from_pairs({"experiment": "flt_queue", "alpha": "fast"}, {})
    assert err.value.field == "alpha"

    with pytest.raises(ConfigError) as err:
        config_from_pairs({"alpha": "0.5"}, {})
    assert err.value.field == "experiment"

    path = _write(tmp_path, "dup.txt", "experiment = flt_queue\nalpha = 0.5\nalpha = 0.6\n")
    with pytest.raises(ConfigError) as err:
        read_config_file(path)
    assert err.value.field == "alpha"


def test_override_precedence():
    cfg = config_from_pairs(
        {"experiment": "flt_queue", "alpha": "0.5"}, {"alpha": "0.7", "rho": "-0.1"}
    )
    assert cfg.alpha == 0.7
    assert cfg.rho == -0.1


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_format_config_roundtrip(experiment, tmp_path):
    cfg = default_config(experiment)
    path = _write(tmp_path, "rt.txt", format_config(cfg))
    assert config_from_pairs(read_config_file(path), {}) == cfg


def test_response_spec_families():
    queue = response_spec(default_config("flt_queue"))
    assert isinstance(queue.model, QueueIndicator)
    assert isinstance(queue.model.eta_law, ParetoRho)
    assert queue.xi_alpha == 0.6

    amp = response_spec(default_config("flt_amplitude"))
    assert isinstance(amp.model, Amplitude)
    assert isinstance(amp.model.eta_law, LogNormalAmp)

    det = response_spec(default_config("martingale_diagnostic"))
    assert isinstance(det.model, QueueIndicator)

    cfg = config_from_pairs(
        {
            "experiment": "martingale_diagnostic",
            "model": "deterministic",
            "rho": "0.2",
            "h_rho": "0.2",
            "eta_law": "constant",
        },
        {},
    )
    assert isinstance(response_spec(cfg).model, Deterministic)

    log_tail = config_from_pairs(
        {"experiment": "flt_queue", "eta_law": "log_tail", "rho": "0.0"}, {}
    )
    assert isinstance(response_spec(log_tail).model.eta_law, LogTail)

    const = config_from_pairs(
        {"experiment": "flt_amplitude", "eta_law": "constant", "eta_c": "2.0"}, {}
    )
    assert isinstance(response_spec(const).model.eta_law, Constant)


def test_selftest_exit_zero(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "selftest: PASS" in out


def test_print_config_parses(capsys, tmp_path):
    assert main(["print-config", "fiiss_sample"]) == 0
    text = capsys.readouterr().out
    path = _write(tmp_path, "printed.txt", text)
    assert config_from_pairs(read_config_file(path), {}) == default_config("fiiss_sample")


def test_run_pass_exit_zero(tmp_path, capsys):
    path = _write(tmp_path, "fm.txt", "experiment = fiiss_moments\n")
    code = main(
        [
            "run",
            path,
            "--replicates", "300",
            "--l-max", "1",
            "--grid-step", "2e-3",
            "--n-y", "400",
            "--moment-rel-tol", "0.5",
            "--out-dir", str(tmp_path / "out"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "fiiss_moments: PASS" in out
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert set(summary) == {"experiment", "params", "reports", "pass", "generated_at"}
    assert summary["experiment"] == "fiiss_moments"
    assert summary["pass"] is True
    assert summary["params"]["replicates"] == 300


def test_run_check_failure_exit_two(tmp_path, capsys):
    path = _write(tmp_path, "q.txt", "experiment = flt_queue\n")
    code = main(
        [
            "run",
            path,
            "--replicates", "40",
            "--t-grid", "5,15",
            "--grid-step", "5e-3",
            "--n-y", "300",
            "--ks-threshold", "1e-9",
            "--out-dir", str(tmp_path / "out"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 2
    assert "flt_queue: FAIL" in out
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["pass"] is False


def test_run_rejects_boundary_rho(tmp_path, capsys):
    path = _write(tmp_path, "bad.txt", "experiment = flt_queue\nalpha = 0.6\nrho = -0.6\n")
    code = main(["run", path, "--out-dir", str(tmp_path / "out")])
    err = capsys.readouterr().err
    assert code == 1
    assert "locally-unbounded" in err


def test_run_rejects_single_replicate(tmp_path, capsys):
    path = _write(tmp_path, "one.txt", "experiment = fiiss_moments\nreplicates = 1\n")
    code = main(["run", path, "--out-dir", str(tmp_path / "out")])
    err = capsys.readouterr().err
    assert code == 1
    assert "replicates" in err


def test_run_missing_config_file(tmp_path, capsys):
    code = main(["run", str(tmp_path / "nope.txt")])
    assert code == 1
    assert "config error" in capsys.readouterr().err


def test_martingale_run_writes_process_samples(tmp_path, capsys):
    path = _write(tmp_path, "m.txt", "experiment = martingale_diagnostic\n")
    code = main(
        [
            "run",
            path,
            "--replicates", "6",
            "--t-grid", "5,15",
            "--out-dir", str(tmp_path / "out"),
        ]
    )
    capsys.readouterr()
    assert code in (0, 2)
    lines = (tmp_path / "out" / "process_samples.csv").read_text().splitlines()
    assert lines[0] == "t_scale,u,replicate,y_scaled,shot_part,martingale_part"
    # 2 scales x 6 replicates x 40 grid points.
    assert len(lines) == 1 + 2 * 6 * 40


def test_fiiss_sample_run_writes_paths(tmp_path, capsys):
    path = _write(tmp_path, "f.txt", "experiment = fiiss_sample\n")
    code = main(
        [
            "run",
            path,
            "--replicates", "50",
            "--grid-step", "2e-3",
            "--n-y", "400",
            "--out-dir", str(tmp_path / "out"),
        ]
    )
    capsys.readouterr()
    assert code in (0, 2)
    lines = (tmp_path / "out" / "fiiss_samples.csv").read_text().splitlines()
    assert lines[0] == "alpha,rho,u,path_id,J_value"
    assert len(lines) == 1 + 2 * 50
    assert (tmp_path / "out" / "self_similarity_cdf.png").exists()


def test_run_outputs_are_reproducible(tmp_path, capsys):
    path = _write(tmp_path, "r.txt", "experiment = shot_noise_moments\n")
    base = [
        "run",
        path,
        "--replicates", "50",
        "--t-grid", "10,40",
        "--l-max", "1",
    ]
    assert main(base + ["--out-dir", str(tmp_path / "a")]) in (0, 2)
    assert main(base + ["--out-dir", str(tmp_path / "b"), "--threads", "3"]) in (0, 2)
    capsys.readouterr()
    a = (tmp_path / "a" / "moments.csv").read_bytes()
    b = (tmp_path / "b" / "moments.csv").read_bytes()
    assert a == b

    sa = json.loads((tmp_path / "a" / "summary.json").read_text())
    sb = json.loads((tmp_path / "b" / "summary.json").read_text())
    sa["params"].pop("out_dir")
    sb["params"].pop("out_dir")
    sa["params"].pop("threads")
    sb["params"].pop("threads")
    sa.pop("generated_at")
    sb.pop("generated_at")
    assert sa == sb


def test_module_selftest_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "immigrate_sim", "selftest"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "selftest: PASS" in proc.stdout


def test_resolve_threads_env(monkeypatch):
    monkeypatch.delenv("IMMIGRATE_SIM_THREADS", raising=False)
    assert resolve_threads(2) == 2
    assert resolve_threads(None) >= 1
    monkeypatch.setenv("IMMIGRATE_SIM_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(5) == 5
    monkeypatch.setenv("IMMIGRATE_SIM_THREADS", "0")
    assert resolve_threads(None) >= 1
