"""Render result tables to matplotlib figures on disk.

Importing this module selects the Agg backend so rendering works without
a display. Figures are a convenience layer over the delimited output:
the data files stay the canonical artifact and nothing here feeds back
into the numbers.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (7.2, 4.45),   # golden-ish ratio
    "figure.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "lines.linewidth": 1.4,
    "lines.markersize": 4.5,
    "legend.fontsize": 8,
    "axes.labelsize": 10,
}

_MARKERS = "osd^vPX*<>"


def _series(rows, x_attr="sweep_value"):
    """Group rows into {(experiment, method, terminal): (x, y_linear)}."""
    grouped = defaultdict(list)
    for row in rows:
        grouped[(row.experiment, row.method, row.terminal)].append(
            (getattr(row, x_attr), row.value_linear))
    return {key: sorted(points) for key, points in grouped.items()}


def _label(key) -> str:
    experiment, method, terminal = key
    variant = experiment.split("/", 1)[1] if "/" in experiment else experiment
    tail = "" if terminal in ("sum",) else f" [{terminal}]"
    return f"{variant} {method}{tail}"


def _db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else float("nan")


def _plot_sweep(rows, axis_label: str):
    fig, ax = plt.subplots()
    finite_series = []
    limit_series = []
    for key, points in sorted(_series(rows).items()):
        if all(math.isinf(x) for x, _ in points):
            limit_series.append((key, points))
        else:
            finite_series.append((key, points))
    for idx, (key, points) in enumerate(finite_series):
        xs = [x for x, _ in points]
        ys = [_db(y) for _, y in points]
        style = "--" if key[2] == "avg" else "-"
        ax.plot(xs, ys, style, marker=_MARKERS[idx % len(_MARKERS)],
                label=_label(key))
    for key, points in limit_series:
        ax.axhline(_db(points[0][1]), linestyle=":",
                   label=_label(key) + " (limit)")
    ax.set_xlabel(axis_label)
    ax.set_ylabel("Expected SINR [dB]")
    ax.legend(loc="best")
    return fig


def _plot_cdf(rows):
    fig, ax = plt.subplots()
    grouped = defaultdict(list)
    for row in rows:
        grouped[(row.experiment, row.method)].append(
            (row.value_linear, row.sweep_value))
    for (experiment, method), points in sorted(grouped.items()):
        points.sort()
        xs = [v for v, _ in points]
        ys = [p for _, p in points]
        ax.step(xs, ys, where="post",
                label=_label((experiment, method, "sum")))
    ax.set_xlabel("Sum spectral efficiency [bits/s/Hz]")
    ax.set_ylabel("Empirical CDF")
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="best")
    return fig


def _plot_single(rows):
    fig, ax = plt.subplots()
    grouped = defaultdict(list)
    for row in rows:
        if row.terminal in ("avg", "sum"):
            continue
        grouped[(row.experiment, row.method, row.sweep_value)].append(
            (int(row.terminal), row.value_linear))
    for idx, (key, points) in enumerate(sorted(grouped.items())):
        points.sort()
        experiment, method, snr_db = key
        ax.plot([t for t, _ in points], [_db(v) for _, v in points],
                marker=_MARKERS[idx % len(_MARKERS)],
                label=f"{_label((experiment, method, 'sum'))} @ {snr_db:g} dB")
    ax.set_xlabel("Terminal index")
    ax.set_ylabel("Expected SINR [dB]")
    ax.legend(loc="best")
    return fig


def render_figures(rows, kind: str, out_path: str) -> list[str]:
    """Render the figure for one run next to its data file.

    ``out_path`` names the data file; the figure lands at the same stem
    with a ``.png`` suffix. Calibration runs have nothing to draw and
    return an empty list.
    """
    builders = {
        "snr_sweep": lambda: _plot_sweep(rows, "Transmit SNR [dB]"),
        "antenna_sweep": lambda: _plot_sweep(rows, "Number of antennas"),
        "sum_se_cdf": lambda: _plot_cdf(rows),
        "single": lambda: _plot_single(rows),
    }
    if kind not in builders or not rows:
        return []
    target = os.path.splitext(out_path)[0] + ".png"
    with plt.rc_context(_STYLE):
        fig = builders[kind]()
        fig.tight_layout()
        fig.savefig(target)
        plt.close(fig)
    return [target]
