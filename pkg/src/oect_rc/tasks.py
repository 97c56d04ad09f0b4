"""Lorenz ground truth and the forecast-horizon metric."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from oect_rc.dynamics import IntegrationDivergence

LORENZ_BASE_POINT = (-7.4, -11.1, 20.0)


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0


@dataclass
class TaskSeries:
    dt: float
    rows: np.ndarray
    t0: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.rows.shape[0])

    def __len__(self):
        return self.rows.shape[0]

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "x", "y", "z"])
            for t, row in zip(self.times, self.rows):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path) -> "TaskSeries":
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["t", "x", "y", "z"]:
                raise ValueError(f"{path}: unexpected header {header}")
            data = np.array([[float(v) for v in line] for line in reader])
        t = data[:, 0]
        dt = float(t[1] - t[0]) if len(t) > 1 else 0.0
        return cls(dt=dt, rows=data[:, 1:], t0=float(t[0]))


@dataclass(frozen=True)
class ForecastResult:
    horizon: float
    exceeded: bool


@numba.njit(cache=True)
def _rate(x, y, z, s, r, b):
    return s * (y - x), x * (r - z) - y, x * y - b * z


def lorenz_rate(u, p: LorenzParams = LorenzParams()) -> np.ndarray:
    x, y, z = (float(v) for v in u)
    return np.array(_rate(x, y, z, p.sigma, p.rho, p.beta))


@numba.njit(cache=True)
def _rk4(u0, dt, steps, s, r, b):
    out = np.empty((steps + 1, 3))
    x, y, z = u0[0], u0[1], u0[2]
    out[0, 0], out[0, 1], out[0, 2] = x, y, z
    h2 = 0.5 * dt
    for i in range(steps):
        a1, a2, a3 = _rate(x, y, z, s, r, b)
        b1, b2, b3 = _rate(x + h2 * a1, y + h2 * a2, z + h2 * a3, s, r, b)
        c1, c2, c3 = _rate(x + h2 * b1, y + h2 * b2, z + h2 * b3, s, r, b)
        d1, d2, d3 = _rate(x + dt * c1, y + dt * c2, z + dt * c3, s, r, b)
        x = x + dt / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
        y = y + dt / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
        z = z + dt / 6.0 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
        out[i + 1, 0], out[i + 1, 1], out[i + 1, 2] = x, y, z
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            return out, i
    return out, -1


def integrate_rk4(
    p: LorenzParams, u0, dt: float, steps: int
) -> TaskSeries:
    """Classical fourth-order Runge-Kutta trajectory of ``steps + 1`` rows."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    u0 = np.asarray(u0, dtype=float)
    rows, bad = _rk4(u0, float(dt), int(steps), p.sigma, p.rho, p.beta)
    if bad >= 0:
        raise IntegrationDivergence(bad, rows[: bad + 1])
    return TaskSeries(dt=dt, rows=rows)


def sample_lorenz_ic(
    rng: np.random.Generator,
    p: LorenzParams = LorenzParams(),
    noise_std: float = 0.1,
    relax_time: float = 10.0,
    dt: float = 0.01,
) -> np.ndarray:
    """Perturb the base point with Gaussian noise and relax onto the attractor."""
    u = np.asarray(LORENZ_BASE_POINT) + rng.normal(0.0, noise_std, size=3)
    steps = int(round(relax_time / dt))
    return integrate_rk4(p, u, dt, steps).rows[-1].copy()


def forecast_horizon(truth, pred, delta: float = 5.0, dt: float | None = None) -> ForecastResult:
    """First time the prediction error norm exceeds ``delta``.

    Row ``j`` of both series is taken to sit at time ``(j + 1) * dt`` after the
    forecast start. Non-finite predictions count as exceedances.
    """
    if isinstance(truth, TaskSeries) or isinstance(pred, TaskSeries):
        dts = {s.dt for s in (truth, pred) if isinstance(s, TaskSeries)}
        if len(dts) != 1:
            raise ValueError("truth and prediction use different time steps")
        dt = dts.pop()
    if dt is None:
        raise ValueError("dt is required when plain arrays are passed")
    u = np.asarray(getattr(truth, "rows", truth), dtype=float)
    v = np.asarray(getattr(pred, "rows", pred), dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: truth {u.shape} vs prediction {v.shape}")
    with np.errstate(invalid="ignore", over="ignore"):
        err = np.linalg.norm(u - v, axis=1)
    bad = ~(err <= delta)
    if not bad.any():
        return ForecastResult(horizon=dt * len(err), exceeded=False)
    return ForecastResult(horizon=dt * (int(np.argmax(bad)) + 1), exceeded=True)
