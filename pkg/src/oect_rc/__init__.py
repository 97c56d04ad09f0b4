"""Reservoir computing on simulated networks of organic electrochemical transistors."""

from oect_rc.device import (
    CoeffPair,
    OectParams,
    Regime,
    channel_current,
    derived_coefficients,
    drain_voltage,
    v1_rate,
)
from oect_rc.network import (
    CouplingMatrix,
    DeviceArray,
    ParamDistributions,
    ResistorNetwork,
    effective_coupling,
    sample_device_array,
    sample_input_matrix,
    sample_topology,
    spectral_radius,
)
from oect_rc.dynamics import (
    IntegrationDivergence,
    ReservoirState,
    StateHistory,
    gate_voltages,
    initial_state,
    reservoir_step,
    run_closed_loop,
    run_open_loop,
)
from oect_rc.readout import (
    IllConditionedError,
    TrainingWindow,
    readout_apply,
    ridge_fit,
)
from oect_rc.tasks import (
    ForecastResult,
    LorenzParams,
    TaskSeries,
    forecast_horizon,
    integrate_rk4,
    lorenz_rate,
    sample_lorenz_ic,
)
from oect_rc.harness import ExperimentConfig, SweepTable, run_trial, sweep

__version__ = "0.1.0"
