"""Time integration of a coupled OECT reservoir.

Each step freezes the external drive and the previous drain voltages, advances
every channel voltage with classical RK4 (optionally split into substeps), and
then re-solves the drain voltages at the new channel voltages. Using the
previous step's drain voltages in the coupling sum breaks the algebraic
``V_G <-> V_D`` loop.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from oect_rc.device import _drain_kernel, drain_voltages
from oect_rc.network import CouplingMatrix, DeviceArray


class IntegrationDivergence(FloatingPointError):
    """Raised when the reservoir state stops being finite.

    ``step`` is the zero-based index of the offending step and ``partial``
    holds whatever output was produced before it (may be ``None``).
    """

    def __init__(self, step: int, partial: np.ndarray | None = None):
        super().__init__(f"reservoir state became non-finite at step {step}")
        self.step = step
        self.partial = partial


@dataclass
class ReservoirState:
    v1: np.ndarray
    v_d: np.ndarray
    t: float = 0.0

    def copy(self) -> "ReservoirState":
        return ReservoirState(self.v1.copy(), self.v_d.copy(), self.t)


@dataclass
class StateHistory:
    times: np.ndarray
    v_d: np.ndarray
    inputs: np.ndarray

    def __len__(self):
        return self.times.shape[0]


def initial_state(devices: DeviceArray) -> ReservoirState:
    """Cold start: zero channel voltage, drain voltage solved at zero gate."""
    n = len(devices)
    v1 = np.zeros(n)
    v_d = drain_voltages(devices.v_bias, devices.v_p, devices.a, devices.b, np.zeros(n), v1)
    return ReservoirState(v1=v1, v_d=v_d, t=0.0)


def gate_voltages(
    coupling: CouplingMatrix, state: ReservoirState, external: np.ndarray
) -> np.ndarray:
    n = coupling.n
    if state.v1.shape != (n,) or state.v_d.shape != (n,) or np.shape(external) != (n,):
        raise ValueError("dimension mismatch between coupling, state and external drive")
    return coupling.f * state.v1 + coupling.a @ state.v_d + external


@numba.njit(cache=True)
def _step(a_mat, f, tau, v_bias, v_p, ca, cb, v1, v_d, ext, h, substeps, v1_out, vd_out):
    n = v1.shape[0]
    lagged = a_mat @ v_d + ext
    hs = h / substeps
    finite = True
    for i in range(n):
        x = v1[i]
        leak = f[i] - 1.0
        g = lagged[i]
        k = 1.0 / tau[i]
        for _ in range(substeps):
            k1 = (leak * x + g) * k
            k2 = (leak * (x + 0.5 * hs * k1) + g) * k
            k3 = (leak * (x + 0.5 * hs * k2) + g) * k
            k4 = (leak * (x + hs * k3) + g) * k
            x = x + hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        v_g = f[i] * x + g
        vd = _drain_kernel(v_bias[i], v_p[i], ca[i], cb[i], v_g, x)[0]
        v1_out[i] = x
        vd_out[i] = vd
        if not (math.isfinite(x) and math.isfinite(vd)):
            finite = False
    return finite


@numba.njit(cache=True)
def _run(a_mat, f, tau, v_bias, v_p, ca, cb, v1, v_d, w_in, w_out, drive, closed, steps, h, substeps):
    n = v1.shape[0]
    out = np.empty((steps, n))
    v1_new = np.empty(n)
    vd_new = np.empty(n)
    for j in range(steps):
        if closed:
            ext = w_in @ (w_out @ v_d)
        else:
            ext = w_in @ drive[j]
        ok = _step(a_mat, f, tau, v_bias, v_p, ca, cb, v1, v_d, ext, h, substeps, v1_new, vd_new)
        v1[:] = v1_new
        v_d[:] = vd_new
        out[j] = vd_new
        if not ok:
            return out, j
    return out, -1


def _device_arrays(devices: DeviceArray):
    return (
        np.ascontiguousarray(devices.tau),
        np.ascontiguousarray(devices.v_bias),
        np.ascontiguousarray(devices.v_p),
        np.ascontiguousarray(devices.a),
        np.ascontiguousarray(devices.b),
    )


def reservoir_step(
    devices: DeviceArray,
    coupling: CouplingMatrix,
    state: ReservoirState,
    external: np.ndarray,
    dt: float,
    substeps: int = 1,
) -> ReservoirState:
    """Advance the reservoir by ``dt`` seconds and return the new state."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    external = np.ascontiguousarray(external, dtype=float)
    gate_voltages(coupling, state, external)  # shape validation
    v1_new = np.empty_like(state.v1)
    vd_new = np.empty_like(state.v_d)
    ok = _step(
        np.ascontiguousarray(coupling.a), np.ascontiguousarray(coupling.f),
        *_device_arrays(devices),
        np.ascontiguousarray(state.v1, dtype=float), np.ascontiguousarray(state.v_d, dtype=float),
        external, float(dt), int(substeps), v1_new, vd_new,
    )
    if not ok:
        raise IntegrationDivergence(0)
    return ReservoirState(v1=v1_new, v_d=vd_new, t=state.t + dt)


def run_open_loop(
    devices: DeviceArray,
    coupling: CouplingMatrix,
    w_in: np.ndarray,
    drive: np.ndarray,
    dt: float,
    initial: ReservoirState,
    substeps: int = 1,
) -> tuple[StateHistory, ReservoirState]:
    """Drive the reservoir with ``drive`` (T x d) and record drain voltages.

    Row ``j`` of the history is the drain voltage after the step driven by
    ``drive[j]``. Returns the history and the final state.
    """
    drive = np.ascontiguousarray(np.atleast_2d(drive), dtype=float)
    if drive.shape[0] < 1:
        raise ValueError("drive must have at least one row")
    if w_in.shape != (len(devices), drive.shape[1]):
        raise ValueError("w_in must be n x d")
    state = initial.copy()
    rows, bad = _run(
        np.ascontiguousarray(coupling.a), np.ascontiguousarray(coupling.f),
        *_device_arrays(devices), state.v1, state.v_d,
        np.ascontiguousarray(w_in, dtype=float), np.zeros((drive.shape[1], len(devices))),
        drive, False, drive.shape[0], float(dt), int(substeps),
    )
    if bad >= 0:
        raise IntegrationDivergence(bad, rows[:bad])
    steps = drive.shape[0]
    times = initial.t + dt * np.arange(1, steps + 1)
    state.t = initial.t + dt * steps
    return StateHistory(times=times, v_d=rows, inputs=drive), state


def run_closed_loop(
    devices: DeviceArray,
    coupling: CouplingMatrix,
    w_in: np.ndarray,
    w_out: np.ndarray,
    initial: ReservoirState,
    steps: int,
    dt: float,
    substeps: int = 1,
) -> np.ndarray:
    """Run autonomously, feeding ``w_out @ v_d`` back through ``w_in``.

    Returns the ``steps x d`` prediction matrix; row ``j`` is the readout of
    the drain voltages after step ``j + 1``.
    """
    n, d = w_in.shape
    if w_out.shape != (d, n):
        raise ValueError("w_out must be d x n, consistent with w_in (n x d)")
    if steps == 0:
        return np.empty((0, d))
    state = initial.copy()
    rows, bad = _run(
        np.ascontiguousarray(coupling.a), np.ascontiguousarray(coupling.f),
        *_device_arrays(devices), state.v1, state.v_d,
        np.ascontiguousarray(w_in, dtype=float), np.ascontiguousarray(w_out, dtype=float),
        np.zeros((1, d)), True, int(steps), float(dt), int(substeps),
    )
    if bad >= 0:
        with np.errstate(all="ignore"):
            partial = rows[: bad + 1] @ w_out.T
        raise IntegrationDivergence(bad, partial)
    return rows @ w_out.T


class OectReservoir:
    """Stateful wrapper exposing the drive/predict interface used by the harness."""

    def __init__(self, devices, coupling, w_in, dt, substeps=1, state=None):
        self.devices = devices
        self.coupling = coupling
        self.w_in = w_in
        self.dt = dt
        self.substeps = substeps
        self.state = initial_state(devices) if state is None else state

    def drive(self, inputs: np.ndarray) -> np.ndarray:
        history, self.state = run_open_loop(
            self.devices, self.coupling, self.w_in, inputs, self.dt, self.state, self.substeps
        )
        return history.v_d

    def predict(self, w_out: np.ndarray, steps: int) -> np.ndarray:
        return run_closed_loop(
            self.devices, self.coupling, self.w_in, w_out, self.state, steps, self.dt, self.substeps
        )


def write_trajectory_csv(history: StateHistory, path) -> None:
    """Debug dump with header ``t,vd_0,...,vd_{n-1}``."""
    path = Path(path)
    n = history.v_d.shape[1]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + [f"vd_{i}" for i in range(n)])
        for t, row in zip(history.times, history.v_d):
            writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])
