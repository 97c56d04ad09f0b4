"""Ridge-regression readout."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

COND_LIMIT = 1e12


class IllConditionedError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class TrainingWindow:
    washout_steps: int = 0
    fit_steps: int | None = None

    def __post_init__(self):
        if self.washout_steps < 0:
            raise ValueError("washout_steps must be >= 0")
        if self.fit_steps is not None and self.fit_steps < 1:
            raise ValueError("fit_steps must be >= 1")

    def select(self, rows: np.ndarray) -> np.ndarray:
        stop = None if self.fit_steps is None else self.washout_steps + self.fit_steps
        return rows[self.washout_steps:stop]


def ridge_fit(history, targets, alpha: float, window: TrainingWindow | None = None) -> np.ndarray:
    """Fit ``W`` (d x n) minimising ``sum_j |W v_j - u_j|^2 + alpha |W|_F^2``.

    ``history`` is a :class:`StateHistory` or a ``T x n`` state matrix and
    ``targets`` the matching ``T x d`` matrix. The penalised problem is solved
    as an augmented least-squares system rather than via normal equations.
    """
    states = np.asarray(getattr(history, "v_d", history), dtype=float)
    targets = np.asarray(targets, dtype=float)
    if targets.ndim == 1:
        targets = targets[:, None]
    if states.shape[0] != targets.shape[0]:
        raise ValueError("states and targets must have the same number of rows")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    window = window or TrainingWindow()
    needed = window.washout_steps + (window.fit_steps or 1)
    if states.shape[0] < needed or states.shape[0] == 0:
        raise ValueError(f"need at least {needed} rows of training data, got {states.shape[0]}")
    x = window.select(states)
    y = window.select(targets)
    n = x.shape[1]
    if alpha == 0:
        cond = np.linalg.cond(x)
        if not cond < COND_LIMIT:
            raise IllConditionedError(f"state matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}")
        lhs, rhs = x, y
    else:
        lhs = np.vstack([x, np.sqrt(alpha) * np.eye(n)])
        rhs = np.vstack([y, np.zeros((n, y.shape[1]))])
    coef, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    w = coef.T
    if not np.all(np.isfinite(w)):
        raise IllConditionedError("readout fit produced non-finite coefficients")
    return np.ascontiguousarray(w)


def readout_apply(w: np.ndarray, v_d: np.ndarray) -> np.ndarray:
    w = np.asarray(w)
    v_d = np.asarray(v_d)
    if w.ndim != 2 or v_d.shape != (w.shape[1],):
        raise ValueError(f"cannot apply readout of shape {w.shape} to vector of shape {v_d.shape}")
    return w @ v_d


def save_readout(w: np.ndarray, path) -> None:
    """Plain-text matrix: header ``d n`` then ``d`` space-separated rows."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    with Path(path).open("w") as fh:
        fh.write(f"{w.shape[0]} {w.shape[1]}\n")
        for row in w:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_readout(path) -> np.ndarray:
    with Path(path).open() as fh:
        d, n = (int(tok) for tok in fh.readline().split())
        rows = [[float(tok) for tok in line.split()] for line in fh if line.strip()]
    w = np.array(rows, dtype=float).reshape(d, n)
    return w
