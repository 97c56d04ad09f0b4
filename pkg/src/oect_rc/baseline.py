"""Discrete-time tanh echo-state reservoir used as the comparison baseline."""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _drive(a, w_in, r, inputs):
    out = np.empty((inputs.shape[0], r.shape[0]))
    for j in range(inputs.shape[0]):
        r = np.tanh(a @ r + w_in @ inputs[j])
        out[j] = r
    return out, r


@numba.njit(cache=True)
def _predict(a, w_in, w_out, r, steps):
    out = np.empty((steps, w_out.shape[0]))
    for j in range(steps):
        r = np.tanh(a @ r + w_in @ (w_out @ r))
        out[j] = w_out @ r
    return out


class TanhReservoir:
    """Leak-free update ``r <- tanh(A r + W_in u)``.

    ``drive`` advances the internal state through a sequence of inputs and
    returns the visited states; ``predict`` runs autonomously from the
    current state without modifying it.
    """

    def __init__(self, a: np.ndarray, w_in: np.ndarray, r: np.ndarray | None = None):
        self.a = np.ascontiguousarray(a, dtype=float)
        self.w_in = np.ascontiguousarray(w_in, dtype=float)
        n = self.a.shape[0]
        if self.a.shape != (n, n) or self.w_in.shape[0] != n:
            raise ValueError("a must be n x n and w_in n x d")
        self.r = np.zeros(n) if r is None else np.asarray(r, dtype=float).copy()

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def drive(self, inputs: np.ndarray) -> np.ndarray:
        inputs = np.ascontiguousarray(np.atleast_2d(inputs), dtype=float)
        if inputs.shape[0] < 1:
            raise ValueError("drive needs at least one input row")
        states, self.r = _drive(self.a, self.w_in, self.r.copy(), inputs)
        return states

    def predict(self, w_out: np.ndarray, steps: int) -> np.ndarray:
        w_out = np.ascontiguousarray(w_out, dtype=float)
        if w_out.shape != (self.w_in.shape[1], self.n):
            raise ValueError("w_out must be d x n")
        if steps == 0:
            return np.empty((0, w_out.shape[0]))
        return _predict(self.a, self.w_in, w_out, self.r.copy(), int(steps))


def tanh_step(res: TanhReservoir, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (res.w_in.shape[1],):
        raise ValueError("input dimension does not match w_in")
    res.r = np.tanh(res.a @ res.r + res.w_in @ u)
    return res.r


def build_tanh_reservoir(
    n: int,
    p: float,
    rng: np.random.Generator,
    d: int = 3,
    spectral_radius: float = 1.0,
    input_scale: float = 0.02,
) -> TanhReservoir:
    """Erdos-Renyi coupling with Uniform(-1, 1) weights rescaled to ``spectral_radius``."""
    present = rng.random((n, n)) < p
    np.fill_diagonal(present, False)
    weights = rng.uniform(-1.0, 1.0, size=(n, n))
    a = np.where(present, weights, 0.0)
    rho = float(np.max(np.abs(np.linalg.eigvals(a)))) if n else 0.0
    if rho > 0:
        a *= spectral_radius / rho
    w_in = rng.uniform(-input_scale, input_scale, size=(n, d))
    return TanhReservoir(a, w_in)


def run_baseline_pipeline(config, rng: np.random.Generator):
    """Train and forecast one tanh reservoir; returns a ``ForecastResult``.

    Uses the same ground truth, readout and metric code as the OECT trials.
    """
    import dataclasses

    from oect_rc.harness import forecast_with_rng

    cfg = dataclasses.replace(config, kind="tanh")
    return forecast_with_rng(cfg, rng).result
