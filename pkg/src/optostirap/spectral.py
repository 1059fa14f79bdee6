"""Eigenstructure of the fluctuation coupling matrix.

Covers eigenvalue branches along a pulse schedule, the zero-eigenvalue dark
mode, closed-form eigenvalues, the first-order decay shift of the dark
eigenvalue, and the three-level STIRAP dark state used as a reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dynamics import build_coupling_matrix
from .errors import NumericalError, PreconditionError
from .meanfield import MeanField, MeanFieldTrajectory, steady_state
from .model import PulseSchedule, SystemParams, drives

DEGENERACY_TOL = 1e-10
# tolerance for "alpha_M = 0" and "alpha real" checks, relative to the field scale
_FIELD_TOL = 1e-12


def eigensystem(M: np.ndarray):
    """Eigenvalues and unit-norm eigenvectors (as columns) of ``M``.

    Hermitian input goes through the Hermitian solver so the returned
    eigenvalues are exactly real.
    """
    M = np.asarray(M, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise NumericalError("NO_CONVERGENCE", "matrix has non-finite entries")
    try:
        if np.array_equal(M, M.conj().T):
            vals, vecs = np.linalg.eigh(M)
            vals = vals.astype(complex)
        else:
            vals, vecs = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("NO_CONVERGENCE", str(exc)) from None
    vecs = vecs / np.linalg.norm(vecs, axis=0)
    residual = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    if np.any(residual > 1e-10 * max(1.0, np.linalg.norm(M, 2))):
        raise NumericalError("NO_CONVERGENCE", f"eigenpair residual {residual.max():.3g}")
    return vals, vecs


def _require_closed_form_regime(params: SystemParams, mf: MeanField, need_decay_free: bool):
    if need_decay_free and params.has_decay():
        raise PreconditionError("PRECONDITION_VIOLATED", "decay rates must be zero")
    if params.j1 != 0.5 or params.j2 != 0.5:
        raise PreconditionError("PRECONDITION_VIOLATED", "closed forms need J1 = J2 = 1/2")
    scale = max(abs(mf.alpha_L), abs(mf.alpha_R), 1.0)
    if abs(mf.alpha_M) > _FIELD_TOL * scale:
        raise PreconditionError("PRECONDITION_VIOLATED", "alpha_M must vanish")
    if abs(mf.alpha_L.imag) > _FIELD_TOL * scale or abs(mf.alpha_R.imag) > _FIELD_TOL * scale:
        raise PreconditionError("PRECONDITION_VIOLATED", "alpha_L, alpha_R must be real")


def analytic_eigenvalues(params: SystemParams, mf: MeanField) -> np.ndarray:
    """Nonzero eigenvalues ``(l2, l3, l4, l5)`` in closed form.

    ``l2 = -l3 = -sqrt(a0 - sqrt(b0)) / 2`` and
    ``l4 = -l5 = -sqrt(a0 + sqrt(b0)) / 2`` with
    ``a0 = 1 + 2 (g1 aL)^2 + 2 (g2 aR)^2`` and
    ``b0 = 1 + 4 (g1 aL)^4 - 8 (g1 aL)^2 (g2 aR)^2 + 4 (g2 aR)^4``.
    Valid only without decay, with ``alpha_M = 0``, real fields and ``J = 1/2``.
    """
    _require_closed_form_regime(params, mf, need_decay_free=True)
    xL = params.g1 * mf.alpha_L.real
    xR = params.g2 * mf.alpha_R.real
    a, b = xL**2, xR**2
    a0 = 1 + 2 * a + 2 * b
    b0 = 1 + 4 * a**2 - 8 * a * b + 4 * b**2
    # a0 - sqrt(b0) cancels for weak fields; a0^2 - b0 = 4(a + b) + 16ab is exact
    inner = -0.5 * np.sqrt((4 * (a + b) + 16 * a * b) / (a0 + np.sqrt(b0)))
    outer = -0.5 * np.sqrt(a0 + np.sqrt(b0))
    return np.array([inner, -inner, outer, -outer], dtype=complex)


def dark_mode_unnormalized(params: SystemParams, mf: MeanField) -> np.ndarray:
    """``(0, 2 g1 g2 aL aR, 0, -g2 aR, g1 aL)`` with no normalization."""
    xL = params.g1 * mf.alpha_L.real
    xR = params.g2 * mf.alpha_R.real
    return np.array([0.0, 2 * xL * xR, 0.0, -xR, xL], dtype=complex)


def null_space_dimension(M: np.ndarray, tol: float = DEGENERACY_TOL) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s <= tol * max(1.0, s[0])))


def null_mode(M: np.ndarray) -> np.ndarray:
    """Right singular vector of the smallest singular value of ``M``."""
    _, _, vh = np.linalg.svd(M)
    v = vh[-1].conj()
    return v / np.linalg.norm(v)


def dark_mode(params: SystemParams, mf: MeanField, allow_degenerate: bool = False) -> np.ndarray:
    """Unit-norm zero-eigenvalue mode of the decay-free coupling matrix.

    Sign convention: the b1 component is ``-g2 aR`` before normalization, so
    it is nonpositive whenever ``g2 aR >= 0``.
    """
    _require_closed_form_regime(params, mf, need_decay_free=False)
    psi = dark_mode_unnormalized(params, mf)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise PreconditionError("DEGENERATE_NULLSPACE", "both outer fields vanish")
    if not allow_degenerate:
        dim = null_space_dimension(build_coupling_matrix(params.without_decay(), mf))
        if dim > 1:
            raise PreconditionError("DEGENERATE_NULLSPACE", f"null space has dimension {dim}")
    return psi / norm


def decay_shift(params: SystemParams, mf: MeanField, normalized: bool = True) -> complex:
    """First-order shift of the dark eigenvalue caused by the decay rates.

    ``psi^T M_decay psi`` with ``M_decay = -i diag(gamma) / 2`` and ``psi`` the
    unnormalized dark mode, which equals
    ``-2i gM (g1 g2 aL aR)^2 - i gm1/2 (g2 aR)^2 - i gm2/2 (g1 aL)^2``.
    With ``normalized=True`` the result is divided by ``psi^T psi``, which
    is what non-degenerate perturbation theory of a complex-symmetric
    matrix prescribes.
    """
    _require_closed_form_regime(params, mf, need_decay_free=False)
    psi = dark_mode_unnormalized(params, mf)
    m_decay = -0.5j * params.decays
    shift = complex(np.sum(psi * m_decay * psi))
    if normalized:
        norm2 = complex(psi @ psi)
        if norm2 == 0:
            raise PreconditionError("DEGENERATE_NULLSPACE", "both outer fields vanish")
        shift /= norm2
    return shift


@dataclass
class SpectralSnapshot:
    time: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dark_index: int
    gap: float
    decay_shift: complex


@dataclass
class SpectralTrajectory:
    """Branch-tracked eigenvalues along a time grid.

    Column ``k`` of ``eigenvalues`` is one continuous branch. ``dark_index``
    names the dark branch. ``ambiguous`` marks grid points where branches
    split from a degeneracy and the labeling is not unique.
    """

    times: np.ndarray
    eigenvalues: np.ndarray  # (n, 5)
    eigenvectors: np.ndarray  # (n, 5, 5), columns follow branch labels
    dark_index: int
    gap: np.ndarray
    decay_shift: np.ndarray
    couplings: np.ndarray  # (n, 2): g1 alpha_L, g2 alpha_R
    ambiguous: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def snapshot(self, i: int) -> SpectralSnapshot:
        return SpectralSnapshot(float(self.times[i]), self.eigenvalues[i], self.eigenvectors[i],
                                self.dark_index, float(self.gap[i]), complex(self.decay_shift[i]))

    @property
    def dark_branch(self) -> np.ndarray:
        return self.eigenvalues[:, self.dark_index]

    def report_order(self) -> np.ndarray:
        """Branch labels with the dark branch first, then inner and outer pairs.

        The non-dark branches are ranked by ``(|Re l|, Re l)`` at the point of
        largest gap, which reproduces the labels l2 < 0 < l3, l4 < 0 < l5.
        """
        ref = int(np.argmax(self.gap))
        others = [k for k in range(5) if k != self.dark_index]
        vals = self.eigenvalues[ref]
        others.sort(key=lambda k: (round(abs(vals[k].real), 12), vals[k].real))
        return np.array([self.dark_index] + others)

    def adiabatic_gap(self, threshold: float = 0.01) -> float:
        """Smallest dark-branch gap while both couplings exceed ``threshold`` of peak.

        Outside that window the extra zero modes are uncoupled and exactly
        degenerate with the dark mode, so they are excluded.
        """
        mags = np.abs(self.couplings)
        peaks = mags.max(axis=0)
        window = np.all(mags >= threshold * peaks, axis=1) & np.all(peaks > 0)
        if not np.any(window):
            return 0.0
        return float(self.gap[window].min())


def _distinct_spacing(vals: np.ndarray) -> float:
    d = np.abs(vals[:, None] - vals[None, :])
    d = d[d > DEGENERACY_TOL]
    return float(d.min()) if d.size else np.inf


def match_branches(prev: np.ndarray, new: np.ndarray):
    """Assignment of ``new`` eigenvalues to ``prev`` branches.

    Returns ``(order, ambiguous)`` where ``new[order[k]]`` continues branch
    ``k``. The assignment minimizes the total eigenvalue displacement.
    """
    cost = np.abs(prev[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    order = cols[np.argsort(rows)]
    moved = new[order]
    ambiguous = False
    for i in range(len(prev)):
        for k in range(i + 1, len(prev)):
            if abs(prev[i] - prev[k]) <= DEGENERACY_TOL and abs(moved[i] - moved[k]) > DEGENERACY_TOL:
                ambiguous = True
    return order, ambiguous


def track_branches(values, vectors=None, seed: Optional[np.ndarray] = None):
    """Sequential continuity matching of a sequence of spectra.

    Parameters
    ----------
    values : array (n, 5)
        Unordered eigenvalues per point.
    vectors : array (n, 5, 5), optional
        Matching eigenvectors (columns), permuted alongside.
    seed : array (5,), optional
        Branch values at the point preceding ``values[0]``; lets a second
        segment continue the labeling of a first one.

    Returns
    -------
    (values, vectors, ambiguous) with columns in branch order.
    """
    values = np.array(values, dtype=complex)
    vectors = None if vectors is None else np.array(vectors, dtype=complex)
    ambiguous = np.zeros(len(values), dtype=bool)
    prev = seed
    for i in range(len(values)):
        if prev is not None:
            order, ambiguous[i] = match_branches(prev, values[i])
            values[i] = values[i][order]
            if vectors is not None:
                vectors[i] = vectors[i][:, order]
        prev = values[i]
    return values, vectors, ambiguous


def _decay_free_fields(params: SystemParams, schedule: PulseSchedule, t: float) -> MeanField:
    return steady_state(params.without_decay(), drives(params, schedule, t))


def spectral_trajectory(params: SystemParams, schedule: PulseSchedule,
                        mft: MeanFieldTrajectory, shift_params: Optional[SystemParams] = None,
                        normalized: bool = True, refine: int = 4) -> SpectralTrajectory:
    """Eigenvalue branches of the coupling matrix along ``mft``.

    Branches are matched between consecutive grid points by minimal total
    displacement. When an eigenvalue moves by at least half the local level
    spacing the interval is subdivided ``refine`` times and tracked through
    the intermediate points; if that is still too coarse the point is marked
    ambiguous. The dark branch is the branch with the smallest mean
    ``|lambda|``, which at the start of the window is the zero eigenvalue
    that the dark mode connects to. ``gap`` is the distance in the complex
    plane from the dark branch to the nearest other branch.

    The decay shift is evaluated on the decay-free fields with the decay
    rates of ``shift_params`` (default: ``params``); it is NaN where the
    closed form does not apply.
    """
    times = mft.times
    if len(times) == 0:
        raise PreconditionError("EMPTY_GRID", "grid is empty")
    shift_params = params if shift_params is None else shift_params
    n = len(times)

    def spectrum_at(t):
        return eigensystem(build_coupling_matrix(params, mft.at(t)))

    vals = np.empty((n, 5), dtype=complex)
    vecs = np.empty((n, 5, 5), dtype=complex)
    ambiguous = np.zeros(n, dtype=bool)
    for i in range(n):
        v, w = eigensystem(build_coupling_matrix(params, mft[i]))
        if i > 0:
            prev = vals[i - 1]
            order, amb = match_branches(prev, v)
            motion = np.abs(v[order] - prev).max()
            if motion >= 0.5 * _distinct_spacing(prev) and refine > 1:
                cur = prev
                amb = False
                for t_sub in np.linspace(times[i - 1], times[i], refine + 1)[1:-1]:
                    sv, _ = spectrum_at(t_sub)
                    o, a = match_branches(cur, sv)
                    cur, amb = sv[o], amb or a
                order, a = match_branches(cur, v)
                amb = amb or a
                if np.abs(v[order] - cur).max() >= 0.5 * _distinct_spacing(cur):
                    amb = True
            v, w = v[order], w[:, order]
            ambiguous[i] = amb
        vals[i], vecs[i] = v, w

    dark = int(np.argmin(np.mean(np.abs(vals), axis=0)))
    # complex distance: equals the real-part spacing without decay, and does not
    # collapse onto damped branches that share the dark branch's real part
    others = np.delete(vals, dark, axis=1)
    gap = np.min(np.abs(others - vals[:, dark:dark + 1]), axis=1)

    shift = np.full(n, np.nan + 0j)
    couplings = np.column_stack([params.g1 * mft.alpha_L, params.g2 * mft.alpha_R])
    if shift_params.j1 == 0.5 and shift_params.j2 == 0.5:
        for i, t in enumerate(times):
            mf0 = _decay_free_fields(params, schedule, t)
            try:
                shift[i] = decay_shift(shift_params, mf0, normalized=normalized)
            except PreconditionError:
                pass
    return SpectralTrajectory(times, vals, vecs, dark, gap, shift, couplings, ambiguous)


def three_level_hamiltonian(omega_p: float, omega_s: float, delta_p: float,
                            delta_s: float) -> np.ndarray:
    """Interaction-picture Lambda-system Hamiltonian in units of hbar."""
    return 0.5 * np.array([
        [0.0, omega_p, 0.0],
        [omega_p, 2 * delta_p, omega_s],
        [0.0, omega_s, 2 * (delta_p - delta_s)],
    ])


def three_level_dark_state(omega_p: float, omega_s: float, delta_p: float = 0.0,
                           delta_s: float = 0.0):
    """Dark state ``(omega_s, 0, -omega_p) / norm`` and its eigenvalue.

    At two-photon resonance the state and the zero eigenvalue are returned
    exactly. Off resonance the eigenpair with the largest overlap with the
    resonant dark state is returned, phased to have positive overlap.
    """
    if omega_p == 0 and omega_s == 0:
        raise PreconditionError("ZERO_FIELDS", "both fields are zero")
    psi = np.array([omega_s, 0.0, -omega_p], dtype=float) + 0.0  # no signed zeros
    psi /= np.linalg.norm(psi)
    if delta_p == delta_s:
        return psi, 0.0
    vals, vecs = np.linalg.eigh(three_level_hamiltonian(omega_p, omega_s, delta_p, delta_s))
    k = int(np.argmax(np.abs(vecs.T @ psi)))
    v = vecs[:, k]
    if v @ psi < 0:
        v = -v
    return v, float(vals[k])
