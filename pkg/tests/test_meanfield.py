import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad_vec

from optostirap import (
    MeanField,
    PulseSchedule,
    SystemParams,
    dynamic_trajectory,
    quasistatic_trajectory,
    steady_state,
)
from optostirap.errors import NumericalError
from optostirap.model import drives, pulse_left


def relation_residuals(p, om, mf):
    """Residuals of the three steady-state relations written out one by one."""
    dL = -p.delta_L + 0.5j * p.gamma_L
    dM = -p.delta_M + 0.5j * p.gamma_M
    dR = -p.delta_R + 0.5j * p.gamma_R
    oL, oM, oR = om
    r = [
        mf.alpha_L - (oL - p.j1 * mf.alpha_M) / dL,
        mf.alpha_R - (oR - p.j2 * mf.alpha_M) / dR,
        mf.alpha_M - (oM - p.j1 * mf.alpha_L - p.j2 * mf.alpha_R) / dM,
    ]
    scale = [abs(mf.alpha_L), abs(mf.alpha_R), abs(mf.alpha_M)]
    return [abs(x) / max(s, 1.0) for x, s in zip(r, scale)]


def alpha_m_elimination(p, om):
    """alpha_M after eliminating the outer modes by hand."""
    dL = -p.delta_L + 0.5j * p.gamma_L
    dM = -p.delta_M + 0.5j * p.gamma_M
    dR = -p.delta_R + 0.5j * p.gamma_R
    oL, oM, oR = om
    return (oM - p.j1 * oL / dL - p.j2 * oR / dR) / (dM - p.j1**2 / dL - p.j2**2 / dR)


def test_zero_drives():
    mf = steady_state(SystemParams(), (0, 0, 0))
    assert mf == MeanField()


def test_decay_free_single_drive(lossless_params):
    om = (350.0, 0.5 * 350.0 / -1.0, 0.0)
    mf = steady_state(lossless_params, om)
    assert mf.alpha_M == 0
    assert mf.alpha_L == pytest.approx(-350.0, rel=1e-15)
    assert mf.alpha_R == 0


def test_transfer_residuals(transfer_params, schedule):
    om = drives(transfer_params, schedule, 0.0)
    mf = steady_state(transfer_params, om)
    assert max(relation_residuals(transfer_params, om, mf)) <= 1e-12
    assert mf.alpha_M == pytest.approx(alpha_m_elimination(transfer_params, om), rel=1e-12)


def test_membrane_amplitudes_are_stationary(transfer_params, schedule):
    p = transfer_params
    mf = steady_state(p, drives(p, schedule, 0.3))
    nM = abs(mf.alpha_M) ** 2
    d1 = -(p.gamma_m1 / 2 + 1j * p.omega_m1) * mf.beta_1 + 1j * p.g1 * (abs(mf.alpha_L) ** 2 - nM)
    d2 = -(p.gamma_m2 / 2 + 1j * p.omega_m2) * mf.beta_2 - 1j * p.g2 * (abs(mf.alpha_R) ** 2 - nM)
    assert abs(d1) < 1e-12 and abs(d2) < 1e-12


def test_singular_system():
    p = SystemParams.decay_free(delta_L=0.0, delta_M=0.0, delta_R=0.0, j1=0.0, j2=0.0)
    with pytest.raises(NumericalError) as exc:
        steady_state(p, (1, 0, 0))
    assert exc.value.code == "SINGULAR_SYSTEM"


@given(st.floats(-1e3, 1e3), st.tuples(*[st.complex_numbers(max_magnitude=1e3)] * 3))
def test_linearity(c, om):
    p = SystemParams()
    a = steady_state(p, om).as_array()[:3]
    b = steady_state(p, [c * x for x in om]).as_array()[:3]
    assert np.allclose(b, c * a, rtol=1e-10, atol=1e-9)


def test_quasistatic_zero_schedule(transfer_params, grid):
    mft = quasistatic_trajectory(transfer_params, PulseSchedule(amplitude=0.0), grid)
    assert mft.kind == "quasi-static"
    assert not np.any(mft.amplitudes)


def test_quasistatic_lossless_closed_form(lossless_params, schedule, grid):
    mft = quasistatic_trajectory(lossless_params, schedule, grid)
    p, s = lossless_params, schedule
    g1aL = p.g1 * s.amplitude / -p.delta_L * np.exp(-((grid - s.half_delay) ** 2) / s.width**2)
    g2aR = p.g2 * s.amplitude / -p.delta_R * np.exp(-((grid + s.half_delay) ** 2) / s.width**2)
    assert np.max(np.abs(p.g1 * mft.alpha_L - g1aL)) <= 1e-12
    assert np.max(np.abs(p.g2 * mft.alpha_R - g2aR)) <= 1e-12
    # middle mode stays exactly empty and the outer fields real
    assert np.all(mft.alpha_M == 0)
    assert np.all(mft.alpha_L.imag == 0) and np.all(mft.alpha_R.imag == 0)


def test_quasistatic_transfer_middle_mode(transfer_params, schedule):
    grid = schedule.grid(3001)
    mft = quasistatic_trajectory(transfer_params, schedule, grid)
    oracle = np.array([alpha_m_elimination(transfer_params, drives(transfer_params, schedule, t))
                       for t in grid])
    assert np.allclose(mft.alpha_M, oracle, rtol=1e-12, atol=1e-12)
    ratio = np.abs(oracle).max() / np.abs(mft.alpha_L).max()
    # with cavity decay the decay-free middle drive leaves a third of the field in a_M
    assert ratio == pytest.approx(0.3262, abs=1e-3)


def test_quasistatic_continuity(transfer_params, schedule):
    grid = schedule.grid(3001)
    mft = quasistatic_trajectory(transfer_params, schedule, grid)
    dt = grid[1] - grid[0]
    jumps = np.abs(np.diff(mft.amplitudes[:, :3], axis=0)).max()
    slope = transfer_params.j1 + schedule.amplitude * 2 / schedule.width  # generous Lipschitz bound
    assert jumps <= 10 * slope * dt


def test_trajectory_grid_checks():
    from optostirap import MeanFieldTrajectory
    with pytest.raises(ValueError):
        MeanFieldTrajectory(np.array([0.0, 0.0]), np.zeros((2, 5)), "dynamic")


def test_dynamic_constant_drive_relaxes():
    p = SystemParams(gamma_m1=0.4, gamma_m2=0.4)
    s = PulseSchedule(amplitude=10.0, width=1e12, half_delay=0.0, t_start=0.0, t_end=100.0)
    # slowest amplitude decay rate is gamma/2 = 0.2; e^{-0.2*100} ~ 2e-9
    mft = dynamic_trajectory(p, s, np.linspace(0.0, 100.0, 11), tol=1e-10)
    target = steady_state(p, drives(p, s, 100.0)).as_array()
    assert np.max(np.abs(mft.amplitudes[-1] - target)) <= 1e-6


def test_dynamic_zero():
    mft = dynamic_trajectory(SystemParams(), PulseSchedule(amplitude=0.0), np.linspace(-15, 15, 31))
    assert mft.kind == "dynamic"
    assert not np.any(mft.amplitudes)


def duhamel_cavity(p, s, t):
    """Cavity amplitudes at t from the variation-of-constants integral."""
    B = np.array([
        [-(p.gamma_L / 2 + 1j * p.delta_L), 1j * p.j1, 0],
        [1j * p.j1, -(p.gamma_M / 2 + 1j * p.delta_M), 1j * p.j2],
        [0, 1j * p.j2, -(p.gamma_R / 2 + 1j * p.delta_R)],
    ])
    lam, V = np.linalg.eig(B)
    Vi = np.linalg.inv(V)

    def integrand(u):
        return V @ (np.exp(lam * (t - u)) * (Vi @ (-1j * drives(p, s, u))))

    val, _ = quad_vec(integrand, s.t_start, t, epsabs=1e-11, epsrel=1e-12, limit=2000)
    return val


def test_dynamic_matches_duhamel(transfer_params, schedule):
    t_peak = schedule.half_delay
    grid = np.linspace(schedule.t_start, t_peak, 201)
    mft = dynamic_trajectory(transfer_params, schedule, grid, tol=1e-11, atol=1e-12)
    oracle = duhamel_cavity(transfer_params, schedule, t_peak)
    assert np.allclose(mft.amplitudes[-1, :3], oracle, rtol=1e-7, atol=1e-6)


def test_quasistatic_approximation_quality(transfer_params):
    # slow pulses: instantaneous steady state tracks the dynamics
    slow = PulseSchedule(width=30.0, half_delay=10.0, t_start=-150.0, t_end=150.0)
    grid = slow.grid(601)
    i = np.argmin(np.abs(grid - slow.half_delay))
    qs = quasistatic_trajectory(transfer_params, slow, grid).alpha_L[i]
    dyn = dynamic_trajectory(transfer_params, slow, grid).alpha_L[i]
    assert abs(dyn - qs) / abs(qs) <= 0.10
    # transfer-dynamics pulses are too fast for the slowest cavity normal mode
    s = PulseSchedule()
    grid = s.grid(601)
    i = np.argmin(np.abs(grid - s.half_delay))
    qs = quasistatic_trajectory(transfer_params, s, grid).alpha_L[i]
    dyn = dynamic_trajectory(transfer_params, s, grid).alpha_L[i]
    assert abs(dyn - qs) / abs(qs) > 0.10


@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.05, 2), st.floats(0.05, 2),
       st.floats(0, 1e3), st.floats(-20, 20))
def test_synthesized_drive_empties_middle_mode(dL, dR, j1, j2, amp, t):
    p = SystemParams.decay_free(delta_L=dL, delta_R=dR, j1=j1, j2=j2)
    s = PulseSchedule(amplitude=amp)
    mf = steady_state(p, drives(p, s, t))
    assert mf.alpha_M == 0
    assert mf.alpha_L.imag == 0 and mf.alpha_R.imag == 0
