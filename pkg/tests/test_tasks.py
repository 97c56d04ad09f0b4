import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from oect_rc.dynamics import IntegrationDivergence
from oect_rc.tasks import (
    LORENZ_BASE_POINT,
    LorenzParams,
    TaskSeries,
    forecast_horizon,
    integrate_rk4,
    lorenz_rate,
    sample_lorenz_ic,
)

LORENZ = LorenzParams()
# endpoint of the 10-unit relaxation from the unperturbed base point (RK4, dt = 0.01)
RELAXED_BASE = (12.824116318625958, 6.368304495668579, 38.48972235170882)


def reference_flow(u0, t):
    sol = solve_ivp(
        lambda _, u: lorenz_rate(u), (0.0, t), u0, method="DOP853", rtol=2.3e-14, atol=1e-14
    )
    return sol.y[:, -1]


def segment(steps=600, seed=0):
    return integrate_rk4(LORENZ, sample_lorenz_ic(np.random.default_rng(seed)), 0.01, steps)


class TestRate:
    def test_fixed_point(self):
        np.testing.assert_array_equal(lorenz_rate((0, 0, 0)), [0, 0, 0])

    def test_z_axis(self):
        np.testing.assert_allclose(lorenz_rate((0, 0, 3.0)), [0, 0, -8.0], rtol=1e-15)

    def test_unit_point(self):
        np.testing.assert_allclose(lorenz_rate((1, 1, 1)), [0.0, 26.0, 1 - 8 / 3], rtol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.tuples(*[st.floats(-20, 20)] * 3))
    def test_divergence_constant(self, u):
        h = 1e-5
        trace = 0.0
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            trace += (lorenz_rate(np.add(u, e))[i] - lorenz_rate(np.subtract(u, e))[i]) / (2 * h)
        assert trace == pytest.approx(-10 - 1 - 8 / 3, abs=1e-6)


class TestIntegrate:
    def test_zero_steps(self):
        series = integrate_rk4(LORENZ, (1.0, 2.0, 3.0), 0.01, 0)
        np.testing.assert_array_equal(series.rows, [[1.0, 2.0, 3.0]])

    def test_z_axis_decay(self):
        rows = integrate_rk4(LORENZ, (0.0, 0.0, 1.0), 0.01, 100).rows
        assert np.all(rows[:, :2] == 0)
        assert rows[-1, 2] == pytest.approx(np.exp(-8 / 3), abs=1e-8)

    def test_z_axis_order(self):
        exact = np.exp(-8 / 3)
        e1 = abs(integrate_rk4(LORENZ, (0, 0, 1), 0.1, 10).rows[-1, 2] - exact)
        e2 = abs(integrate_rk4(LORENZ, (0, 0, 1), 0.05, 20).rows[-1, 2] - exact)
        assert 12 <= e1 / e2 <= 20

    def test_fourth_order_off_axis(self):
        # from (1, 1, 1) the error is still pre-asymptotic at dt = 0.01 (ratio ~37)
        exact = reference_flow([1.0, 1.0, 1.0], 1.0)
        e1 = np.linalg.norm(integrate_rk4(LORENZ, (1, 1, 1), 1 / 1600, 1600).rows[-1] - exact)
        e2 = np.linalg.norm(integrate_rk4(LORENZ, (1, 1, 1), 1 / 3200, 3200).rows[-1] - exact)
        assert 12 <= e1 / e2 <= 20
        coarse = np.linalg.norm(integrate_rk4(LORENZ, (1, 1, 1), 0.01, 100).rows[-1] - exact)
        assert coarse < 1e-3

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            integrate_rk4(LORENZ, (1, 1, 1), 0.0, 10)

    def test_blow_up_reported(self):
        with pytest.raises(IntegrationDivergence):
            integrate_rk4(LORENZ, (1e200, 1e200, 1e200), 0.01, 10)

    def test_times(self):
        series = integrate_rk4(LORENZ, (1, 1, 1), 0.25, 4)
        np.testing.assert_allclose(series.times, [0, 0.25, 0.5, 0.75, 1.0])


class TestInitialCondition:
    def test_noise_free_fixture(self):
        u = sample_lorenz_ic(np.random.default_rng(0), noise_std=0.0)
        np.testing.assert_allclose(u, RELAXED_BASE, rtol=1e-12)

    def test_noise_free_close_to_accurate_flow(self):
        # at a fine step the RK4 endpoint agrees with a high-order reference
        u = sample_lorenz_ic(np.random.default_rng(0), noise_std=0.0, dt=1e-3)
        np.testing.assert_allclose(u, reference_flow(list(LORENZ_BASE_POINT), 10.0), atol=1e-3)

    def test_seeds_differ_and_stay_bounded(self):
        a = sample_lorenz_ic(np.random.default_rng(1))
        b = sample_lorenz_ic(np.random.default_rng(2))
        assert not np.allclose(a, b)
        assert 0 < a[2] < 50 and 0 < b[2] < 50

    def test_forward_orbit_in_box(self):
        rows = integrate_rk4(LORENZ, sample_lorenz_ic(np.random.default_rng(3)), 0.01, 5000).rows
        assert np.all(np.abs(rows[:, 0]) <= 25)
        assert np.all(np.abs(rows[:, 1]) <= 30)
        assert np.all((rows[:, 2] >= 0) & (rows[:, 2] <= 50))

    def test_seeded(self):
        np.testing.assert_array_equal(
            sample_lorenz_ic(np.random.default_rng(4)), sample_lorenz_ic(np.random.default_rng(4))
        )


class TestForecastHorizon:
    def test_perfect_prediction(self):
        truth = segment(300)
        res = forecast_horizon(truth, truth, 5.0)
        assert not res.exceeded
        assert res.horizon == pytest.approx(0.01 * 301)

    def test_constant_offset(self):
        truth = segment(300)
        pred = TaskSeries(dt=0.01, rows=truth.rows + [6.0, 0.0, 0.0])
        res = forecast_horizon(truth, pred, 5.0)
        assert res.exceeded and res.horizon == 0.01

    def test_zero_prediction_scan_oracle(self):
        truth = segment(800, seed=5)
        res = forecast_horizon(truth, TaskSeries(0.01, np.zeros_like(truth.rows)), 5.0)
        first = None
        for j, row in enumerate(truth.rows):
            if np.sqrt(row[0] ** 2 + row[1] ** 2 + row[2] ** 2) > 5.0:
                first = j
                break
        assert res.horizon == pytest.approx(0.01 * (first + 1))

    def test_nan_counts_as_exceedance(self):
        truth = np.zeros((5, 3))
        pred = np.zeros((5, 3))
        pred[2] = np.nan
        res = forecast_horizon(truth, pred, 5.0, dt=0.1)
        assert res.horizon == pytest.approx(0.3)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            forecast_horizon(np.zeros((5, 3)), np.zeros((4, 3)), dt=0.1)

    def test_step_mismatch(self):
        with pytest.raises(ValueError):
            forecast_horizon(TaskSeries(0.1, np.zeros((5, 3))), TaskSeries(0.2, np.zeros((5, 3))))

    def test_arrays_need_dt(self):
        with pytest.raises(ValueError):
            forecast_horizon(np.zeros((5, 3)), np.zeros((5, 3)))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 1000), st.floats(0.1, 20), st.floats(0.1, 20))
    def test_monotone_in_delta(self, seed, d1, d2):
        rng = np.random.default_rng(seed)
        truth = rng.standard_normal((50, 3)) * 5
        pred = truth + rng.standard_normal((50, 3)) * np.linspace(0, 10, 50)[:, None]
        lo, hi = sorted((d1, d2))
        assert forecast_horizon(truth, pred, lo, dt=0.1).horizon <= forecast_horizon(truth, pred, hi, dt=0.1).horizon

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 1000), st.integers(1, 30))
    def test_append_after_exceedance(self, seed, extra):
        rng = np.random.default_rng(seed)
        truth = rng.standard_normal((40, 3))
        pred = truth.copy()
        pred[25] += 10.0
        base = forecast_horizon(truth, pred, 5.0, dt=0.1)
        more_t = np.vstack([truth, rng.standard_normal((extra, 3))])
        more_p = np.vstack([pred, rng.standard_normal((extra, 3))])
        assert forecast_horizon(more_t, more_p, 5.0, dt=0.1) == base


def test_series_csv_round_trip(tmp_path):
    series = segment(50)
    path = tmp_path / "truth.csv"
    series.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,x,y,z"
    back = TaskSeries.from_csv(path)
    np.testing.assert_array_equal(back.rows, series.rows)
    assert back.dt == pytest.approx(series.dt)
