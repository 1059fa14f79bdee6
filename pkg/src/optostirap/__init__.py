"""Adiabatic transfer of phonon-number fluctuations between two membranes.

A membrane pair divides an optical cavity into three coupled sub-cavities.
Delayed Gaussian drives on the outer sub-cavities make the optomechanical
couplings time dependent and move membrane fluctuations from the first
membrane to the second through a zero-eigenvalue dark mode.
"""

from .config import RunConfig, parse_config, serialize_config
from .dynamics import (
    MomentTrajectory,
    build_coupling_matrix,
    build_diffusion,
    initial_moments,
    integrate_moments,
    occupancies,
    propagate_moments,
    propagator_oracle,
    transfer_efficiency,
)
from .errors import ConfigError, NumericalError, OptomechError, PreconditionError
from .meanfield import (
    MeanField,
    MeanFieldTrajectory,
    dynamic_trajectory,
    quasistatic_trajectory,
    steady_state,
)
from .model import (
    PulseSchedule,
    SystemParams,
    ValidationReport,
    pulse_left,
    pulse_middle,
    pulse_right,
    thermal_occupancy,
    validate_params,
)
from .pipeline import SimulationResult, simulate
from .spectral import (
    SpectralSnapshot,
    SpectralTrajectory,
    analytic_eigenvalues,
    dark_mode,
    decay_shift,
    eigensystem,
    spectral_trajectory,
    three_level_dark_state,
    track_branches,
)
from .sweep import SweepAxis, SweepResult, best_point, run_sweep

__version__ = "0.1.0"
