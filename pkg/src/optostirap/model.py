"""Parameter records, pulse envelopes and bath thermodynamics.

All rates are dimensionless multiples of a 1 MHz reference rate and time is
measured in the reciprocal unit. No unit conversion is performed anywhere in
the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import List

import numpy as np

from .errors import ConfigError, PreconditionError

MODE_NAMES = ("aL", "aM", "aR", "b1", "b2")


@dataclass(frozen=True)
class SystemParams:
    """Physical rates of the three-sub-cavity, two-membrane system.

    Defaults are the transfer-dynamics parameter set: red-sideband detunings
    equal to the mechanical frequencies, ``g = 1e-3``, ``J = 1/2``, cavity
    decay 0.4, membrane decay 1e-4 and vacuum-limited membrane baths.
    """

    delta_L: float = 1.0
    delta_M: float = 1.0
    delta_R: float = 1.0
    omega_m1: float = 1.0
    omega_m2: float = 1.0
    g1: float = 1e-3
    g2: float = 1e-3
    j1: float = 0.5
    j2: float = 0.5
    gamma_L: float = 0.4
    gamma_M: float = 0.4
    gamma_R: float = 0.4
    gamma_m1: float = 1e-4
    gamma_m2: float = 1e-4
    nbar1: float = 0.0
    nbar2: float = 0.0

    @classmethod
    def decay_free(cls, **overrides) -> "SystemParams":
        """Eigenvalue-analysis parameter set: every decay rate zero."""
        base = dict(gamma_L=0.0, gamma_M=0.0, gamma_R=0.0, gamma_m1=0.0, gamma_m2=0.0)
        base.update(overrides)
        return cls(**base)

    @property
    def decays(self) -> np.ndarray:
        """Decay rates in mode order (aL, aM, aR, b1, b2)."""
        return np.array(
            [self.gamma_L, self.gamma_M, self.gamma_R, self.gamma_m1, self.gamma_m2]
        )

    def has_decay(self) -> bool:
        return bool(np.any(self.decays != 0.0))

    def without_decay(self) -> "SystemParams":
        return replace(self, gamma_L=0.0, gamma_M=0.0, gamma_R=0.0,
                       gamma_m1=0.0, gamma_m2=0.0)

    def scale_decays(self, eps: float) -> "SystemParams":
        return replace(
            self,
            gamma_L=eps * self.gamma_L,
            gamma_M=eps * self.gamma_M,
            gamma_R=eps * self.gamma_R,
            gamma_m1=eps * self.gamma_m1,
            gamma_m2=eps * self.gamma_m2,
        )

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PulseSchedule:
    """Gaussian drive schedule.

    ``half_delay`` is tau: the right drive peaks at ``-tau`` and the left drive
    at ``+tau``, so for ``tau > 0`` the right pulse comes first.
    """

    amplitude: float = 350.0
    width: float = 3.0
    half_delay: float = 1.0
    t_start: float = -15.0
    t_end: float = 15.0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ConfigError("INVALID_VALUE", f"amplitude must be >= 0, got {self.amplitude}")
        if not self.width > 0:
            raise ConfigError("INVALID_VALUE", f"width must be > 0, got {self.width}")
        if not self.t_start < self.t_end:
            raise ConfigError("INVALID_VALUE", "t_start must be < t_end")

    def grid(self, n_points: int) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, n_points)

    def replace(self, **changes) -> "PulseSchedule":
        return replace(self, **changes)


def default_window(width: float) -> tuple:
    """Integration window of five pulse widths on either side of zero."""
    return (-5.0 * width, 5.0 * width)


def pulse_left(schedule: PulseSchedule, t):
    """Left-cavity drive ``A exp(-(t - tau)^2 / T^2)``."""
    t = np.asarray(t, dtype=float)
    return schedule.amplitude * np.exp(-((t - schedule.half_delay) ** 2) / schedule.width**2)


def pulse_right(schedule: PulseSchedule, t):
    """Right-cavity drive ``A exp(-(t + tau)^2 / T^2)``."""
    t = np.asarray(t, dtype=float)
    return schedule.amplitude * np.exp(-((t + schedule.half_delay) ** 2) / schedule.width**2)


def pulse_middle(params: SystemParams, schedule: PulseSchedule, t):
    """Middle-cavity drive that keeps the middle mode empty without decay.

    ``Omega_M = J1 Omega_L / (-Delta_L) + J2 Omega_R / (-Delta_R)``.
    """
    if params.delta_L == 0 or params.delta_R == 0:
        raise PreconditionError("ZERO_DETUNING", "delta_L and delta_R must be nonzero")
    return (params.j1 * (pulse_left(schedule, t) / -params.delta_L)
            + params.j2 * (pulse_right(schedule, t) / -params.delta_R))


def drives(params: SystemParams, schedule: PulseSchedule, t) -> np.ndarray:
    """Drive triple (Omega_L, Omega_M, Omega_R) at time ``t``."""
    return np.array([
        pulse_left(schedule, t),
        pulse_middle(params, schedule, t),
        pulse_right(schedule, t),
    ])


def thermal_occupancy(omega_m: float, ratio: float) -> float:
    """Bose-Einstein occupancy ``1 / (exp(ratio) - 1)``.

    Parameters
    ----------
    omega_m : float
        Mechanical frequency. Only carried for bookkeeping; the occupancy
        depends on it solely through ``ratio``.
    ratio : float
        hbar * omega_m / (k_B * T). ``inf`` means zero temperature.
    """
    if not ratio > 0:
        raise PreconditionError("NONPOSITIVE_RATIO", f"ratio must be > 0, got {ratio}")
    if math.isinf(ratio):
        return 0.0
    return 1.0 / math.expm1(ratio)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: List[Finding] = field(default_factory=list)

    @property
    def errors(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> List[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> List[str]:
        return [f.code for f in self.findings]

    def as_dicts(self) -> List[dict]:
        return [dict(severity=f.severity, code=f.code, message=f.message)
                for f in self.findings]


_NONNEGATIVE = ("gamma_L", "gamma_M", "gamma_R", "gamma_m1", "gamma_m2", "nbar1", "nbar2")


def validate_params(params: SystemParams, schedule: PulseSchedule,
                    strict: bool = False, rtol: float = 1e-9) -> ValidationReport:
    """Check physical consistency of a parameter set and pulse schedule.

    Never raises. Warnings flag regimes where the effective model is
    marginal (broken red-sideband resonance, displacement coupling not
    linear, weak-coupling/RWA condition at risk). With ``strict=True``
    warnings are promoted to errors.
    """
    report = ValidationReport()
    add = report.findings.append

    for f in fields(params):
        value = getattr(params, f.name)
        if not math.isfinite(value):
            add(Finding("error", "NON_FINITE", f"{f.name} is not finite ({value})"))
    for name in ("amplitude", "width", "half_delay", "t_start", "t_end"):
        value = getattr(schedule, name)
        if not math.isfinite(value):
            add(Finding("error", "NON_FINITE", f"{name} is not finite ({value})"))
    if report.errors:
        return report

    for name in _NONNEGATIVE:
        if getattr(params, name) < 0:
            add(Finding("error", "NEGATIVE_VALUE", f"{name} must be >= 0"))
    for name in ("omega_m1", "omega_m2"):
        if getattr(params, name) <= 0:
            add(Finding("error", "NONPOSITIVE_FREQUENCY", f"{name} must be > 0"))
    if schedule.amplitude < 0:
        add(Finding("error", "NEGATIVE_VALUE", "amplitude must be >= 0"))
    if schedule.width <= 0:
        add(Finding("error", "NONPOSITIVE_WIDTH", "width must be > 0"))
    if schedule.t_start >= schedule.t_end:
        add(Finding("error", "EMPTY_WINDOW", "t_start must be < t_end"))
    if report.errors:
        return report

    warn = "error" if strict else "warning"
    omegas = {"omega_m1": params.omega_m1, "omega_m2": params.omega_m2}
    for dname in ("delta_L", "delta_M", "delta_R"):
        delta = getattr(params, dname)
        for oname, omega in omegas.items():
            if not math.isclose(delta, omega, rel_tol=rtol, abs_tol=0.0):
                add(Finding(warn, "RESONANCE",
                            f"{dname}={delta} differs from {oname}={omega}: red-sideband resonance broken"))
    for jname, oname in (("j1", "omega_m1"), ("j2", "omega_m2")):
        j, omega = getattr(params, jname), omegas[oname]
        if not math.isclose(j, 0.5 * omega, rel_tol=rtol, abs_tol=0.0):
            add(Finding(warn, "LINEAR_COUPLING",
                        f"{jname}={j} differs from 0.5*{oname}={0.5 * omega}"))

    outer = [abs(params.delta_L), abs(params.delta_R)]
    if min(outer) > 0:
        alpha_est = schedule.amplitude / min(outer)
        coupling = max(abs(params.g1), abs(params.g2)) * alpha_est
        limit = 0.5 * min(params.omega_m1, params.omega_m2)
        if coupling >= limit:
            add(Finding(warn, "WEAK_COUPLING",
                        f"peak g*alpha ~ {coupling:.4g} >= {limit:.4g}: rotating-wave approximation marginal"))
    else:
        add(Finding(warn, "WEAK_COUPLING", "zero outer detuning: intracavity amplitude unbounded"))
    return report
