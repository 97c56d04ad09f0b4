"""Seeded trials, parameter sweeps and result export."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from oect_rc.baseline import build_tanh_reservoir
from oect_rc.dynamics import IntegrationDivergence, OectReservoir
from oect_rc.network import (
    ParamDistributions,
    effective_coupling,
    sample_device_array,
    sample_input_matrix,
    sample_topology,
)
from oect_rc.readout import IllConditionedError, TrainingWindow, ridge_fit
from oect_rc.tasks import (
    ForecastResult,
    LorenzParams,
    TaskSeries,
    forecast_horizon,
    integrate_rk4,
    sample_lorenz_ic,
)

log = logging.getLogger(__name__)

AXES = ("n", "v_p_mean", "p", "alpha")
RESULT_HEADER = ["axis", "value", "mean_fh", "std_fh", "trials", "failures"]
TRIAL_HEADER = ["trial", "value", "fh", "exceeded", "failed"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a batch of trials.

    Durations are in Lorenz time units. One Lorenz unit corresponds to
    ``time_scale`` seconds of device time, and every reservoir step is
    integrated with ``substeps`` RK4 substeps.
    """

    kind: str = "oect"
    n: int = 100
    p: float = 0.1
    params: ParamDistributions = field(default_factory=ParamDistributions)
    sigma_in: float = 1e-3
    alpha: float = 1e-7
    dt: float = 0.005
    time_scale: float = 20.0
    substeps: int = 5
    leak_neglected: bool = True
    r_w_low: float = 100.0
    r_w_high: float = 500.0
    train_duration: float = 100.0
    washout_duration: float = 10.0
    predict_duration: float = 25.0
    delta: float = 5.0
    trials: int = 20
    master_seed: int = 0
    ic_noise_std: float = 0.1
    ic_relax_time: float = 10.0
    tanh_spectral_radius: float = 1.0
    tanh_input_scale: float = 0.02

    def __post_init__(self):
        if self.kind not in ("oect", "tanh"):
            raise ValueError(f"kind must be 'oect' or 'tanh', got {self.kind!r}")
        for name in ("dt", "train_duration", "predict_duration", "delta", "time_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.washout_duration < 0:
            raise ValueError("washout_duration must be >= 0")
        if self.washout_duration >= self.train_duration:
            raise ValueError("washout must be shorter than the training run")
        if self.trials < 1 or self.n < 1 or self.substeps < 1:
            raise ValueError("trials, n and substeps must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    @property
    def train_steps(self) -> int:
        return int(round(self.train_duration / self.dt))

    @property
    def washout_steps(self) -> int:
        return int(round(self.washout_duration / self.dt))

    @property
    def predict_steps(self) -> int:
        return int(round(self.predict_duration / self.dt))

    def with_axis(self, axis: str, value) -> "ExperimentConfig":
        if axis == "n":
            return dataclasses.replace(self, n=int(value))
        if axis == "v_p_mean":
            return dataclasses.replace(self, params=self.params.with_mean("v_p", float(value)))
        if axis == "p":
            return dataclasses.replace(self, p=float(value))
        if axis == "alpha":
            return dataclasses.replace(self, alpha=float(value))
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["params"] = self.params.as_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "params" in d:
            merged = ParamDistributions().as_dict()
            merged.update(d["params"])
            d["params"] = ParamDistributions.from_dict(merged)
        return cls(**d)


def load_config(path) -> ExperimentConfig:
    with Path(path).open() as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def save_config(cfg: ExperimentConfig, path) -> None:
    with Path(path).open("w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def trial_rng(master_seed: int, value_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, value_index, trial_index]))


def build_reservoir(cfg: ExperimentConfig, rng: np.random.Generator):
    """Sample a fresh reservoir of ``cfg.kind`` exposing ``drive``/``predict``."""
    if cfg.kind == "tanh":
        return build_tanh_reservoir(
            cfg.n, cfg.p, rng, d=3,
            spectral_radius=cfg.tanh_spectral_radius, input_scale=cfg.tanh_input_scale,
        )
    devices = sample_device_array(cfg.params, cfg.n, rng)
    net = sample_topology(cfg.n, cfg.p, rng, cfg.r_w_low, cfg.r_w_high, r_g=devices.r_g)
    coupling = effective_coupling(net, leak_neglected=cfg.leak_neglected)
    w_in = sample_input_matrix(cfg.n, 3, cfg.sigma_in, rng)
    return OectReservoir(devices, coupling, w_in, cfg.dt * cfg.time_scale, cfg.substeps)


@dataclass
class Forecast:
    truth: TaskSeries
    prediction: TaskSeries
    result: ForecastResult
    diverged: bool = False


def train_and_forecast(reservoir, series: np.ndarray, cfg: ExperimentConfig) -> Forecast:
    """Teacher-force ``reservoir`` on the training segment, fit, then free-run.

    ``series`` holds ``train_steps + predict_steps + 1`` rows; the state after
    the step driven by row ``j`` is regressed onto row ``j + 1``.
    """
    n_train, n_pred = cfg.train_steps, cfg.predict_steps
    states = reservoir.drive(series[:n_train])
    window = TrainingWindow(washout_steps=cfg.washout_steps, fit_steps=n_train - cfg.washout_steps)
    w_out = ridge_fit(states, series[1 : n_train + 1], cfg.alpha, window)
    diverged = False
    try:
        pred = reservoir.predict(w_out, n_pred)
    except IntegrationDivergence as exc:
        diverged = True
        pred = np.full((n_pred, series.shape[1]), np.nan)
        if exc.partial is not None:
            pred[: len(exc.partial)] = exc.partial
    truth = TaskSeries(cfg.dt, series[n_train + 1 : n_train + 1 + n_pred], t0=cfg.dt)
    prediction = TaskSeries(cfg.dt, pred, t0=cfg.dt)
    return Forecast(truth, prediction, forecast_horizon(truth, prediction, cfg.delta), diverged)


def forecast_with_rng(cfg: ExperimentConfig, rng: np.random.Generator) -> Forecast:
    # The initial condition is drawn first so both reservoir kinds see the same
    # trajectory for a given seed.
    lorenz = LorenzParams()
    u0 = sample_lorenz_ic(rng, lorenz, cfg.ic_noise_std, cfg.ic_relax_time, cfg.dt)
    series = integrate_rk4(lorenz, u0, cfg.dt, cfg.train_steps + cfg.predict_steps).rows
    reservoir = build_reservoir(cfg, rng)
    return train_and_forecast(reservoir, series, cfg)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    value: float | int | None
    fh: float
    exceeded: bool
    failed: bool
    diverged: bool = False
    error: str = ""


def run_trial(cfg: ExperimentConfig, trial_index: int, value_index: int = 0, value=None) -> TrialRecord:
    """One independent trial: fresh architecture and initial condition.

    Training failures (ill-conditioned fits, divergence while teacher-forced)
    are returned as failed records instead of raised.
    """
    rng = trial_rng(cfg.master_seed, value_index, trial_index)
    try:
        fc = forecast_with_rng(cfg, rng)
    except (IllConditionedError, IntegrationDivergence, np.linalg.LinAlgError) as exc:
        log.warning("trial %d (value %r) failed: %s", trial_index, value, exc)
        return TrialRecord(trial_index, value, math.nan, False, True, error=str(exc))
    return TrialRecord(
        trial_index, value, fc.result.horizon, fc.result.exceeded, False, fc.diverged
    )


@dataclass(frozen=True)
class SweepRow:
    value: float | int
    mean_fh: float
    std_fh: float
    trials: int
    failures: int


@dataclass
class SweepTable:
    axis: str
    rows: list[SweepRow]
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def values(self) -> list:
        return [r.value for r in self.rows]

    def row(self, value) -> SweepRow:
        for r in self.rows:
            if r.value == value:
                return r
        raise KeyError(value)


def summarize(value, records: Sequence[TrialRecord]) -> SweepRow:
    """Mean and population standard deviation over successful trials.

    Uses compensated summation so the result does not depend on trial order.
    """
    ok = [r.fh for r in records if not r.failed]
    failures = len(records) - len(ok)
    if not ok:
        return SweepRow(value, math.nan, math.nan, len(records), failures)
    mean = math.fsum(ok) / len(ok)
    var = math.fsum((x - mean) ** 2 for x in ok) / len(ok)
    return SweepRow(value, mean, math.sqrt(var), len(records), failures)


def _run_one(args):
    cfg, trial_index, value_index, value = args
    return run_trial(cfg, trial_index, value_index, value)


def sweep(
    cfg: ExperimentConfig, axis: str, values: Sequence, workers: int = 1
) -> SweepTable:
    """Run ``cfg.trials`` trials for every value of ``axis``.

    Rows follow the order of ``values``. With ``workers > 1`` trials run in a
    process pool; results are identical to the sequential run.
    """
    values = list(values)
    if not values:
        raise ValueError("values must be non-empty")
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    jobs = [
        (cfg.with_axis(axis, v), t, vi, v)
        for vi, v in enumerate(values)
        for t in range(cfg.trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(job) for job in jobs]
    rows = []
    for vi, v in enumerate(values):
        chunk = records[vi * cfg.trials : (vi + 1) * cfg.trials]
        rows.append(summarize(v, chunk))
        log.info("%s=%s: mean FH %.3f (std %.3f, %d failed)", axis, v, rows[-1].mean_fh, rows[-1].std_fh, rows[-1].failures)
    return SweepTable(axis, rows, records)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def export_results(table: SweepTable, path) -> Path:
    """Write the sweep summary CSV; identical tables give identical bytes."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_HEADER)
            for r in table.rows:
                writer.writerow([table.axis, _fmt(r.value), _fmt(r.mean_fh), _fmt(r.std_fh), r.trials, r.failures])
    except OSError as exc:
        raise OSError(f"could not write results to {path}: {exc}") from exc
    return path


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_results(path) -> SweepTable:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RESULT_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows, axes = [], set()
        for axis, value, mean, std, trials, failures in reader:
            axes.add(axis)
            rows.append(SweepRow(_parse_value(value), float(mean), float(std), int(trials), int(failures)))
    if len(axes) > 1:
        raise ValueError(f"{path}: mixed axes {sorted(axes)}")
    return SweepTable(axes.pop() if axes else "", rows)


def export_trials(table: SweepTable, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_HEADER)
        for r in table.records:
            writer.writerow([r.trial, _fmt(r.value), _fmt(r.fh), int(r.exceeded), int(r.failed)])
    return path
