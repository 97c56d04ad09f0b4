import pytest

from oect_rc.harness import ExperimentConfig

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def small_cfg():
    """Cheap OECT configuration for pipeline plumbing tests."""
    return ExperimentConfig(
        n=20, dt=0.01, time_scale=10.0, substeps=3,
        train_duration=12.0, washout_duration=2.0, predict_duration=3.0, trials=3,
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
