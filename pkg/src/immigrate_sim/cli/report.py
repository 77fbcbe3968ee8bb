"""File and figure output for experiment runs.

CSV files are the canonical machine-readable product: '.' decimal, comma
separator, headers always present, floats at 17 significant digits so a
re-run with the same config is byte-identical.  The JSON summary carries
the config echo and one entry per reported check; its timestamp is the
only field allowed to differ between identical runs.  Figures are drawn
with an explicit Agg canvas so no global pyplot state is touched.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = [
    "format_value",
    "write_csv",
    "write_json_summary",
    "save_figure",
    "trend_figure",
    "cdf_figure",
    "hist_figure",
]


def format_value(value) -> str:
    """One CSV cell; floats get 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header, rows) -> Path:
    """Write rows under a header; returns the path for report listing."""
    lines = [",".join(header)]
    lines.extend(",".join(format_value(cell) for cell in row) for row in rows)
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json_summary(
    path: Path, experiment: str, params: dict, reports: list[dict], passed: bool
) -> Path:
    """Summary with config echo, per-check entries, and the overall verdict."""
    payload = {
        "experiment": experiment,
        "params": params,
        "reports": reports,
        "pass": bool(passed),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig = Figure(figsize=(6.4, 4.2), dpi=120)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    return fig, ax


def save_figure(fig: Figure, path: Path) -> Path:
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    return path


def trend_figure(
    x,
    series: dict[str, np.ndarray],
    title: str,
    xlabel: str,
    ylabel: str,
    threshold: float | None = None,
) -> Figure:
    """Trend lines on a log x axis, with a pass threshold if given.

    The y axis goes logarithmic only when every plotted value is
    positive, so identically-zero diagnostics still render.
    """
    fig, ax = _new_axes(title, xlabel, ylabel)
    positive = True
    for label, values in series.items():
        values = np.asarray(values, dtype=np.float64)
        positive = positive and bool(np.all(values > 0.0))
        ax.plot(x, values, marker="o", label=label)
    ax.set_xscale("log")
    if positive and (threshold is None or threshold > 0.0):
        ax.set_yscale("log")
    if threshold is not None:
        ax.axhline(threshold, color="crimson", linestyle="--", label="threshold")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def cdf_figure(samples: dict[str, np.ndarray], title: str, xlabel: str) -> Figure:
    """Empirical CDF overlay of several samples."""
    fig, ax = _new_axes(title, xlabel, "empirical CDF")
    for label, values in samples.items():
        values = np.sort(np.asarray(values, dtype=np.float64))
        grid = np.arange(1, values.size + 1) / values.size
        ax.step(values, grid, where="post", label=label, linewidth=1.0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def hist_figure(
    values, title: str, xlabel: str, vline: float | None = None
) -> Figure:
    """Density histogram, optionally with a reference vertical line."""
    fig, ax = _new_axes(title, xlabel, "density")
    ax.hist(np.asarray(values, dtype=np.float64), bins=80, density=True, alpha=0.75)
    if vline is not None:
        ax.axvline(vline, color="crimson", linestyle="--", label="theoretical mean")
        ax.legend()
    ax.grid(True, alpha=0.3)
    return fig
