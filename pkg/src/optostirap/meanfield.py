"""Classical mean-field amplitudes of the cavity and membrane modes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericalError, PreconditionError
from .model import PulseSchedule, SystemParams, drives

QUASI_STATIC = "quasi-static"
DYNAMIC = "dynamic"


@dataclass(frozen=True)
class MeanField:
    alpha_L: complex = 0j
    alpha_M: complex = 0j
    alpha_R: complex = 0j
    beta_1: complex = 0j
    beta_2: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha_L, self.alpha_M, self.alpha_R, self.beta_1, self.beta_2],
                        dtype=complex)

    @classmethod
    def from_array(cls, values) -> "MeanField":
        v = np.asarray(values, dtype=complex)
        return cls(*(complex(x) for x in v))


def _cavity_matrix(params: SystemParams) -> np.ndarray:
    p = params
    return np.array([
        [-p.delta_L + 0.5j * p.gamma_L, p.j1, 0.0],
        [p.j1, -p.delta_M + 0.5j * p.gamma_M, p.j2],
        [0.0, p.j2, -p.delta_R + 0.5j * p.gamma_R],
    ], dtype=complex)


def membrane_steady_state(params: SystemParams, alpha_L, alpha_M, alpha_R):
    """Membrane amplitudes driven by the radiation-pressure imbalance."""
    nL, nM, nR = abs(alpha_L) ** 2, abs(alpha_M) ** 2, abs(alpha_R) ** 2
    beta_1 = 1j * params.g1 * (nL - nM) / (0.5 * params.gamma_m1 + 1j * params.omega_m1)
    beta_2 = -1j * params.g2 * (nR - nM) / (0.5 * params.gamma_m2 + 1j * params.omega_m2)
    return beta_1, beta_2


def _pivot(delta: float, gamma: float):
    # stay real when undamped so the division rounds like the real drive synthesis
    return complex(-delta, 0.5 * gamma) if gamma else float(-delta)


def _div(z, d):
    if isinstance(d, complex):
        return z / d
    return complex(z.real / d, z.imag / d)


def _solve_cavity(params: SystemParams, omega: np.ndarray) -> np.ndarray:
    """Direct solve of the tridiagonal cavity system.

    The outer modes are eliminated in favour of the middle one. The
    operation order mirrors :func:`~optostirap.model.pulse_middle`, so with
    the synthesized middle drive and no decay the middle amplitude cancels to
    exactly zero. Falls back to a dense LU solve if an outer pivot vanishes.
    """
    p = params
    dL, dM, dR = (_pivot(p.delta_L, p.gamma_L), _pivot(p.delta_M, p.gamma_M),
                  _pivot(p.delta_R, p.gamma_R))
    oL, oM, oR = omega
    if dL != 0 and dR != 0:
        schur = dM - (p.j1 * _div(p.j1, dL) + p.j2 * _div(p.j2, dR))
        if abs(schur) > 1e3 * np.finfo(float).eps * (abs(dM) + p.j1**2 / abs(dL) + p.j2**2 / abs(dR)):
            aM = _div(oM - (p.j1 * _div(oL, dL) + p.j2 * _div(oR, dR)), schur)
            return np.array([_div(oL - p.j1 * aM, dL), aM, _div(oR - p.j2 * aM, dR)])
    return np.linalg.solve(_cavity_matrix(p), omega)


def steady_state(params: SystemParams, drive_triple) -> MeanField:
    """Coupled steady state for fixed drives ``(Omega_L, Omega_M, Omega_R)``.

    The three cavity relations are solved together as one complex linear
    system; the membrane amplitudes follow from the solved cavity fields.
    The modified detunings are taken as given constants.
    """
    K = _cavity_matrix(params)
    omega = np.asarray(drive_triple, dtype=complex)
    if np.linalg.cond(K) > 1.0 / np.finfo(float).eps:
        raise NumericalError("SINGULAR_SYSTEM", "cavity steady-state system is singular")
    alpha = _solve_cavity(params, omega)
    residual = np.abs(K @ alpha - omega)
    scale = np.abs(K) @ np.abs(alpha) + np.abs(omega)
    if np.any(residual > 1e-12 * scale + 1e-290):
        raise NumericalError("SINGULAR_SYSTEM", "steady-state residual above 1e-12 relative")
    beta_1, beta_2 = membrane_steady_state(params, *alpha)
    return MeanField(complex(alpha[0]), complex(alpha[1]), complex(alpha[2]),
                     complex(beta_1), complex(beta_2))


@dataclass
class MeanFieldTrajectory:
    """Mean-field amplitudes on a time grid.

    ``amplitudes`` has shape ``(n, 5)`` in the order
    (alpha_L, alpha_M, alpha_R, beta_1, beta_2). ``evaluate`` gives the
    amplitudes at arbitrary times inside the grid span; integrators use it
    to sample the coupling between grid points.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    kind: str
    evaluate: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ValueError("time grid must be a nonempty 1-D array")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        if self.amplitudes.shape != (len(self.times), 5):
            raise ValueError("need one 5-component record per grid point")

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> MeanField:
        return MeanField.from_array(self.amplitudes[i])

    @property
    def alpha_L(self) -> np.ndarray:
        return self.amplitudes[:, 0]

    @property
    def alpha_M(self) -> np.ndarray:
        return self.amplitudes[:, 1]

    @property
    def alpha_R(self) -> np.ndarray:
        return self.amplitudes[:, 2]

    def at(self, t: float) -> MeanField:
        if self.evaluate is not None:
            return MeanField.from_array(self.evaluate(t))
        re = [np.interp(t, self.times, self.amplitudes[:, k].real) for k in range(5)]
        im = [np.interp(t, self.times, self.amplitudes[:, k].imag) for k in range(5)]
        return MeanField.from_array(np.array(re) + 1j * np.array(im))


def quasistatic_trajectory(params: SystemParams, schedule: PulseSchedule,
                           grid) -> MeanFieldTrajectory:
    """Instantaneous steady state under the slowly varying drives."""
    grid = np.asarray(grid, dtype=float)

    def evaluate(t):
        try:
            return steady_state(params, drives(params, schedule, t)).as_array()
        except NumericalError as exc:
            raise NumericalError(exc.code, f"{exc.message} at t={t!r}") from None

    amps = np.array([evaluate(t) for t in grid]).reshape(len(grid), 5)
    return MeanFieldTrajectory(grid, amps, QUASI_STATIC, evaluate)


def _meanfield_rhs(params: SystemParams, schedule: PulseSchedule):
    p = params
    decay = 0.5 * np.array([p.gamma_L, p.gamma_M, p.gamma_R]) + 1j * np.array(
        [p.delta_L, p.delta_M, p.delta_R])
    mech = 0.5 * np.array([p.gamma_m1, p.gamma_m2]) + 1j * np.array([p.omega_m1, p.omega_m2])

    def rhs(t, y):
        aL, aM, aR, b1, b2 = y
        oL, oM, oR = drives(p, schedule, t)
        nM = abs(aM) ** 2
        return np.array([
            -decay[0] * aL + 1j * p.j1 * aM - 1j * oL,
            -decay[1] * aM + 1j * p.j1 * aL + 1j * p.j2 * aR - 1j * oM,
            -decay[2] * aR + 1j * p.j2 * aM - 1j * oR,
            -mech[0] * b1 + 1j * p.g1 * (abs(aL) ** 2 - nM),
            -mech[1] * b2 - 1j * p.g2 * (abs(aR) ** 2 - nM),
        ])

    return rhs


def dynamic_trajectory(params: SystemParams, schedule: PulseSchedule, grid,
                       initial: MeanField = MeanField(), tol: float = 1e-9,
                       atol: float = 1e-12) -> MeanFieldTrajectory:
    """Integrate the mean-field equations of motion over ``grid``.

    The integration starts at ``grid[0]`` from ``initial`` and uses an
    adaptive eighth-order Runge-Kutta scheme with relative tolerance ``tol``.
    """
    if not tol > 0:
        raise PreconditionError("INVALID_TOLERANCE", "tol must be > 0")
    grid = np.asarray(grid, dtype=float)
    y0 = initial.as_array()
    if len(grid) == 1:
        return MeanFieldTrajectory(grid, y0[None, :], DYNAMIC, lambda t: y0)
    sol = solve_ivp(_meanfield_rhs(params, schedule), (grid[0], grid[-1]), y0,
                    method="DOP853", rtol=tol, atol=atol, t_eval=grid, dense_output=True)
    if not sol.success:
        raise NumericalError("STEP_FAILURE", sol.message)
    return MeanFieldTrajectory(grid, sol.y.T, DYNAMIC, sol.sol)
