"""One full simulation: mean field, moment dynamics and spectrum."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import MomentTrajectory, initial_moments, propagate_moments, transfer_efficiency
from .errors import PreconditionError
from .meanfield import MeanFieldTrajectory, dynamic_trajectory, quasistatic_trajectory
from .model import PulseSchedule, SystemParams
from .spectral import SpectralTrajectory, spectral_trajectory

SOURCE_INITIAL = (0.0, 0.0, 0.0, 1.0, 0.0)


@dataclass
class SimulationResult:
    meanfield: MeanFieldTrajectory
    moments: MomentTrajectory
    spectrum: Optional[SpectralTrajectory]
    eta: float
    peak_n_aM: float
    min_gap: float
    integrated_shift: float
    runtime: float

    def metrics(self) -> dict:
        return dict(eta=self.eta, peak_n_aM=self.peak_n_aM, min_gap=self.min_gap,
                    integrated_shift=self.integrated_shift)


def meanfield_trajectory(params: SystemParams, schedule: PulseSchedule, grid,
                         mode: str = "quasi-static", tol: float = 1e-9) -> MeanFieldTrajectory:
    if mode in ("quasi-static", "quasistatic"):
        return quasistatic_trajectory(params, schedule, grid)
    if mode == "dynamic":
        return dynamic_trajectory(params, schedule, grid, tol=tol)
    raise ValueError(f"unknown mean-field mode {mode!r}")


def simulate(params: SystemParams, schedule: PulseSchedule, n_points: int = 601,
             initial: Sequence[float] = SOURCE_INITIAL, meanfield: str = "quasi-static",
             rtol: float = 1e-11, atol: float = 1e-12, normalized_shift: bool = True,
             shift_params: Optional[SystemParams] = None,
             with_spectrum: bool = True) -> SimulationResult:
    """Run the mean-field, moment and spectral stages on a uniform grid.

    ``eta`` is NaN when the initial b1 occupancy is zero.
    """
    start = time.perf_counter()
    grid = schedule.grid(n_points)
    mft = meanfield_trajectory(params, schedule, grid, meanfield, tol=rtol)
    moments = propagate_moments(params, schedule, mft, initial_moments(initial), tol=rtol, atol=atol)
    occ = moments.occupancies
    try:
        eta = transfer_efficiency(moments)
    except PreconditionError:
        eta = float("nan")
    spectrum = None
    min_gap = integrated = float("nan")
    if with_spectrum:
        spectrum = spectral_trajectory(params, schedule, mft, shift_params=shift_params,
                                       normalized=normalized_shift)
        min_gap = spectrum.adiabatic_gap()
        ok = np.isfinite(spectrum.decay_shift)
        if np.any(ok):
            integrated = float(np.trapezoid(np.abs(spectrum.decay_shift[ok]), grid[ok]))
    return SimulationResult(mft, moments, spectrum, eta, float(occ[:, 1].max()), min_gap,
                            integrated, time.perf_counter() - start)
