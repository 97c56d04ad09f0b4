"""Figures written next to the CSV outputs.

Only the object-oriented matplotlib API is used, so no interactive backend is
ever selected.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

AXIS_LABELS = {
    "n": "Reservoir size $N$",
    "v_p_mean": "Pinch-off voltage $V_p$ (V)",
    "p": "Connection probability $p$",
    "alpha": r"Ridge parameter $\alpha$",
}
KIND_STYLE = {
    "oect": dict(color="tab:blue", linestyle="--", marker="o", label="OECT RC"),
    "tanh": dict(color="teal", linestyle="-.", marker="s", label="tanh RC"),
}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    return path


def plot_sweep(tables: dict, path) -> Path:
    """Mean forecast horizon with standard-deviation error bars.

    ``tables`` maps a reservoir kind (``"oect"``/``"tanh"`` or any label) to a
    :class:`~oect_rc.harness.SweepTable`.
    """
    fig = Figure(figsize=(5, 3.5))
    ax = fig.add_subplot()
    axis = None
    for kind, table in tables.items():
        axis = table.axis
        x = np.array([float(r.value) for r in table.rows])
        mean = np.array([r.mean_fh for r in table.rows])
        std = np.array([r.std_fh for r in table.rows])
        style = KIND_STYLE.get(kind, dict(marker="o", label=str(kind)))
        ax.errorbar(x, mean, yerr=std, capsize=3, **style)
    if axis == "alpha":
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS.get(axis, axis or ""))
    ax.set_ylabel("Forecast horizon")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_forecast(truth, predictions: dict, path) -> Path:
    """x, y, z panels: ground truth against one or more closed-loop predictions."""
    fig = Figure(figsize=(6, 5))
    axes = fig.subplots(3, 1, sharex=True)
    t = truth.times
    for i, (ax, name) in enumerate(zip(axes, "xyz")):
        ax.plot(t, truth.rows[:, i], color="0.5", lw=1.5, label="truth")
        for kind, pred in predictions.items():
            style = dict(KIND_STYLE.get(kind, dict(label=str(kind))))
            style.pop("marker", None)
            ax.plot(pred.times, pred.rows[:, i], lw=1.0, **style)
        ax.set_ylabel(name)
    axes[-1].set_xlabel("t (Lorenz time units)")
    axes[0].legend(frameon=False, ncol=len(predictions) + 1, fontsize="small")
    return _save(fig, path)


def plot_attractor(truth, prediction, path) -> Path:
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot(*truth.rows.T, color="0.6", lw=0.5, label="truth")
    ax.plot(*prediction.rows.T, color="tab:blue", lw=0.5, label="prediction")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.legend(frameon=False)
    return _save(fig, path)
