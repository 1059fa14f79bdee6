"""Fluctuation coupling matrix and second-moment propagation.

Mode ordering everywhere is (da_L, da_M, da_R, db_1, db_2). The
fluctuation vector obeys ``i dF/dt = M F`` plus input noise, and the
normal-ordered moments ``N_ij = <dF_i^dag dF_j>`` obey

    dN/dt = i (conj(M) N - N M^T) + D

with ``D = diag(0, 0, 0, gamma_m1 nbar1, gamma_m2 nbar2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import DOP853
from scipy.linalg import expm

from .errors import NumericalError, PreconditionError
from .meanfield import MeanField, MeanFieldTrajectory
from .model import PulseSchedule, SystemParams

PSD_TOL = 1e-6
CLAMP_TOL = 1e-10


def build_coupling_matrix(params: SystemParams, mf: MeanField,
                          conjugate: bool = True) -> np.ndarray:
    """5x5 fluctuation coupling matrix at one instant.

    The optical rows carry ``g alpha`` and the membrane rows carry
    ``g conj(alpha)``, as generated by the beam-splitter Hamiltonian. For real
    amplitudes this is the familiar symmetric form. ``conjugate=False`` puts
    the unconjugated amplitude in both places, which is symmetric but not
    Hermitian when the amplitudes are complex.
    """
    p = params
    aL, aM, aR = mf.alpha_L, mf.alpha_M, mf.alpha_R
    c = np.conj if conjugate else (lambda z: z)
    M = np.diag(-0.5j * p.decays).astype(complex)
    M[0, 1] = M[1, 0] = -p.j1
    M[1, 2] = M[2, 1] = -p.j2
    M[0, 3] = -p.g1 * aL
    M[1, 3] = p.g1 * aM
    M[1, 4] = -p.g2 * aM
    M[2, 4] = p.g2 * aR
    M[3, 0] = -p.g1 * c(aL)
    M[3, 1] = p.g1 * c(aM)
    M[4, 1] = -p.g2 * c(aM)
    M[4, 2] = p.g2 * c(aR)
    return M


def build_diffusion(params: SystemParams) -> np.ndarray:
    """Normal-ordered input-noise matrix. Vacuum optical inputs contribute nothing."""
    return np.diag([0.0, 0.0, 0.0, params.gamma_m1 * params.nbar1,
                    params.gamma_m2 * params.nbar2])


def moment_rhs(M: np.ndarray, N: np.ndarray, D: np.ndarray) -> np.ndarray:
    return 1j * (M.conj() @ N - N @ M.T) + D


def hermitize(N: np.ndarray) -> np.ndarray:
    return 0.5 * (N + N.conj().T)


def occupancies(N: np.ndarray) -> np.ndarray:
    """Mean fluctuation occupancies: the real diagonal of ``N``.

    Values in ``[-1e-10, 0)`` are round-off and clamp to zero; anything more
    negative is a genuine violation.
    """
    d = np.real(np.diagonal(np.asarray(N)))
    if np.any(d < -CLAMP_TOL):
        raise NumericalError("NEGATIVE_OCCUPANCY", f"diagonal {d} has negative entries")
    return np.where(d < 0, 0.0, d)


def initial_moments(occ) -> np.ndarray:
    """Uncorrelated initial moment matrix with the given occupancies on the diagonal."""
    occ = np.asarray(occ, dtype=float)
    if occ.shape != (5,) or np.any(occ < 0) or not np.all(np.isfinite(occ)):
        raise PreconditionError("INVALID_MOMENTS", "need five finite nonnegative occupancies")
    return np.diag(occ).astype(complex)


@dataclass
class MomentTrajectory:
    times: np.ndarray
    moments: np.ndarray  # (n, 5, 5)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def occupancies(self) -> np.ndarray:
        return np.array([occupancies(N) for N in self.moments])

    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(N).min() for N in self.moments))


def _check_psd(N: np.ndarray, t: float) -> None:
    lam = np.linalg.eigvalsh(N).min()
    if lam < -PSD_TOL:
        raise NumericalError("PSD_VIOLATION", f"min eigenvalue {lam:.3g} at t={t:.6g}")


def integrate_moments(coupling: Callable[[float], np.ndarray], D: np.ndarray,
                      N0: np.ndarray, times, rtol: float = 1e-11,
                      atol: float = 1e-12) -> MomentTrajectory:
    """Adaptive DOP853 integration of the moment equation on ``times``.

    ``coupling(t)`` returns the coupling matrix at time ``t``. The state is
    re-Hermitized after every accepted step and sampled on ``times`` through
    the stepper's dense output. The default ``rtol`` is tight because a
    rank-deficient ``N`` picks up negative eigenvalues of the size of the
    local error; 1e-11 keeps them well inside the 1e-10 positivity bound.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    N0 = np.asarray(N0, dtype=complex)
    if not np.allclose(N0, N0.conj().T, atol=1e-10):
        raise PreconditionError("INVALID_MOMENTS", "initial moment matrix is not Hermitian")
    _check_psd(N0, times[0])

    out = np.empty((len(times), 5, 5), dtype=complex)
    out[0] = hermitize(N0)
    if len(times) == 1:
        return MomentTrajectory(times, out)

    def f(t, y):
        return moment_rhs(coupling(t), y.reshape(5, 5), D).ravel()

    solver = DOP853(f, times[0], out[0].ravel(), times[-1], rtol=rtol, atol=atol)
    k = 1
    while k < len(times):
        t_prev = solver.t
        msg = solver.step()
        if solver.status == "failed":
            raise NumericalError("STEP_FAILURE", f"{msg} at t={solver.t:.6g}")
        y = hermitize(solver.y.reshape(5, 5))
        if not np.all(np.isfinite(y)):
            raise NumericalError("STEP_FAILURE", f"non-finite state at t={solver.t:.6g}")
        solver.y = y.ravel()
        solver.f = f(solver.t, solver.y)
        # dense output covers [t_prev, t]; re-Hermitize samples as well
        if times[k] <= solver.t:
            dense = solver.dense_output()
            while k < len(times) and times[k] <= solver.t:
                Nk = y if times[k] == solver.t else hermitize(dense(times[k]).reshape(5, 5))
                _check_psd(Nk, times[k])
                out[k] = Nk
                k += 1
        if solver.status == "finished" and k < len(times):
            raise NumericalError("STEP_FAILURE", f"integration stopped at t={solver.t:.6g}")
        if solver.t == t_prev:
            raise NumericalError("STEP_FAILURE", "step size underflow")
    return MomentTrajectory(times, out)


def propagate_moments(params: SystemParams, schedule: PulseSchedule,
                      mft: MeanFieldTrajectory, N0: np.ndarray, tol: float = 1e-11,
                      atol: float = 1e-12, conjugate: bool = True) -> MomentTrajectory:
    """Second moments over the grid of ``mft`` driven by its mean fields.

    ``schedule`` is accepted for interface symmetry with the mean-field
    builders; the drives enter only through ``mft``.
    """

    def coupling(t):
        return build_coupling_matrix(params, mft.at(t), conjugate)

    return integrate_moments(coupling, build_diffusion(params), N0, mft.times,
                             rtol=tol, atol=atol)


def diffusion_step(Mbar: np.ndarray, D: np.ndarray, h: float):
    """Exact one-interval propagator for constant coupling.

    Returns ``(G, Q)`` with ``N(t + h) = G N G^dag + Q`` where
    ``G = exp(i conj(M) h)`` and ``Q = int_0^h G(s) D G(s)^dag ds``,
    computed from one block exponential (Van Loan).
    """
    A = 1j * Mbar
    n = A.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = -A
    block[:n, n:] = D
    block[n:, n:] = A.conj().T
    F = expm(block * h)
    G = F[n:, n:].conj().T
    Q = G @ F[:n, n:]
    return G, hermitize(Q)


def propagator_oracle(params: SystemParams, schedule: PulseSchedule,
                      mft: MeanFieldTrajectory, N0: np.ndarray, steps: int,
                      conjugate: bool = True) -> MomentTrajectory:
    """Piecewise-constant matrix-exponential propagation of the moments.

    The window spanned by ``mft`` is split into ``steps`` uniform intervals,
    refined so that every grid point is also a breakpoint. On each interval
    the coupling is frozen at its midpoint value and the moment map is
    applied exactly. The scheme is second order in the interval length.
    """
    if steps < 1:
        raise PreconditionError("INVALID_STEPS", "steps must be >= 1")
    grid = mft.times
    N = np.asarray(N0, dtype=complex)
    out = np.empty((len(grid), 5, 5), dtype=complex)
    out[0] = N
    if len(grid) == 1:
        return MomentTrajectory(grid, out)
    D = build_diffusion(params)
    with_noise = np.any(D != 0)
    edges = np.union1d(np.linspace(grid[0], grid[-1], steps + 1), grid)
    k = 1
    for a, b in zip(edges[:-1], edges[1:]):
        h = b - a
        M = build_coupling_matrix(params, mft.at(0.5 * (a + b)), conjugate)
        if with_noise:
            G, Q = diffusion_step(M.conj(), D, h)
            N = G @ N @ G.conj().T + Q
        else:
            E = expm(-1j * M * h)
            N = E.conj() @ N @ E.T
        if not np.all(np.isfinite(N)):
            raise NumericalError("OVERFLOW", f"non-finite moments at t={b:.6g}")
        if k < len(grid) and np.isclose(b, grid[k], rtol=0, atol=1e-12 * max(1.0, abs(b))):
            out[k] = N
            k += 1
    return MomentTrajectory(grid, out)


def transfer_efficiency(trajectory: MomentTrajectory) -> float:
    """Final b2 occupancy divided by initial b1 occupancy."""
    if len(trajectory) == 0:
        raise PreconditionError("EMPTY_TRAJECTORY", "trajectory is empty")
    start = occupancies(trajectory.moments[0])[3]
    if start <= 0:
        raise PreconditionError("ZERO_INITIAL", "initial b1 occupancy is zero")
    return float(occupancies(trajectory.moments[-1])[4] / start)
