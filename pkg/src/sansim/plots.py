"""Figure rendering for run reports, router comparisons, and sweeps.

Headless by construction (Agg backend); every function writes a PNG next to
the delimited output and returns the path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import MetricsReport

_PANELS = (
    ("delivery_ratio", "delivery ratio"),
    ("overhead_ratio", "overhead ratio"),
    ("avg_latency", "average latency (s)"),
    ("avg_hop_count", "average hop count"),
)


def _series(report: MetricsReport, attr: str):
    xs = [s.t / 3600.0 for s in report.snapshots]
    ys = [getattr(s, attr) for s in report.snapshots]
    return xs, ys


def timeseries_figure(report: MetricsReport, path) -> Path:
    """Four-panel time series for a single run."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, (attr, label) in zip(axes.flat, _PANELS):
        xs, ys = _series(report, attr)
        ax.plot(xs, ys, marker=".", markersize=3)
        ax.set_xlabel("time (hours)")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def comparison_figure(reports: dict[str, MetricsReport], path) -> Path:
    """Four-panel time series, one line per router."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, (attr, label) in zip(axes.flat, _PANELS):
        for name, report in reports.items():
            xs, ys = _series(report, attr)
            ax.plot(xs, ys, label=name)
        ax.set_xlabel("time (hours)")
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    axes.flat[0].legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def sweep_figure(param_name: str, rows: list[tuple], path) -> Path:
    """Mean final metrics against one swept parameter.

    rows: (param value, means dict) pairs as produced by the sweep harness.
    """
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    labels = [str(v) for v, _ in rows]
    xs = range(len(rows))
    for ax, (key, label) in zip(axes.flat, _PANELS):
        ax.plot(xs, [means[key] for _, means in rows], marker="o")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels)
        ax.set_xlabel(param_name)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
