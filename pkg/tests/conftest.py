import numpy as np
import pytest

from optostirap import PulseSchedule, SystemParams, initial_moments, quasistatic_trajectory


@pytest.fixture
def lossless_params():
    return SystemParams.decay_free()


@pytest.fixture
def transfer_params():
    return SystemParams()


@pytest.fixture
def schedule():
    return PulseSchedule()


@pytest.fixture
def grid(schedule):
    return schedule.grid(601)


@pytest.fixture
def transfer_initial():
    return initial_moments([0, 0, 0, 1, 0])


@pytest.fixture(scope="session")
def transfer_run():
    """Quasi-static moment run at the default transfer parameters, shared by several tests."""
    from optostirap import propagate_moments

    params, schedule = SystemParams(), PulseSchedule()
    mft = quasistatic_trajectory(params, schedule, schedule.grid(301))
    traj = propagate_moments(params, schedule, mft, initial_moments([0, 0, 0, 1, 0]))
    return params, schedule, mft, traj


def random_hermitian_psd(rng, n=5):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return X @ X.conj().T / n


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
