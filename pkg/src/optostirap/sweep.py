"""Grid sweeps over pulse and system parameters."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .errors import ConfigError, OptomechError
from .model import PulseSchedule, SystemParams
from .pipeline import simulate

AXIS_NAMES = ("A", "T", "tau", "gamma_M", "gamma_m", "g", "nbar")
DEFAULT_MAX_CELLS = 100_000


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: Tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError("INVALID_AXIS", f"unknown axis {self.name!r}; choose from {AXIS_NAMES}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigError("INVALID_AXIS", f"axis {self.name!r} has no values")
        object.__setattr__(self, "values", values)

    @classmethod
    def parse(cls, spec: str) -> "SweepAxis":
        """Parse ``name=v1,v2,...``."""
        name, sep, rest = spec.partition("=")
        if not sep:
            raise ConfigError("INVALID_AXIS", f"axis spec {spec!r} is not name=v1,v2,...")
        try:
            values = [float(v) for v in rest.split(",") if v.strip()]
        except ValueError:
            raise ConfigError("INVALID_AXIS", f"non-numeric value in axis spec {spec!r}") from None
        return cls(name.strip(), tuple(values))


def apply_axis(params: SystemParams, schedule: PulseSchedule, name: str, value: float):
    if name == "A":
        return params, schedule.replace(amplitude=value)
    if name == "T":
        return params, schedule.replace(width=value)
    if name == "tau":
        return params, schedule.replace(half_delay=value)
    if name == "gamma_M":
        return params.replace(gamma_M=value), schedule
    if name == "gamma_m":
        return params.replace(gamma_m1=value, gamma_m2=value), schedule
    if name == "g":
        return params.replace(g1=value, g2=value), schedule
    if name == "nbar":
        return params.replace(nbar1=value, nbar2=value), schedule
    raise ConfigError("INVALID_AXIS", f"unknown axis {name!r}")


@dataclass
class SweepRecord:
    values: Tuple[float, ...]
    eta: float = math.nan
    peak_n_aM: float = math.nan
    min_gap: float = math.nan
    integrated_shift: float = math.nan
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class SweepResult:
    axes: List[SweepAxis]
    records: List[SweepRecord] = field(default_factory=list)

    @property
    def names(self) -> List[str]:
        return [a.name for a in self.axes]


def _run_cell(job):
    params, schedule, names, values, settings = job
    try:
        for name, value in zip(names, values):
            params, schedule = apply_axis(params, schedule, name, value)
        res = simulate(params, schedule, **settings)
    except (OptomechError, ValueError) as exc:
        return SweepRecord(values, error=str(exc))
    return SweepRecord(values, res.eta, res.peak_n_aM, res.min_gap, res.integrated_shift)


def run_sweep(params: SystemParams, schedule: PulseSchedule, axes: Sequence[SweepAxis],
              max_cells: int = DEFAULT_MAX_CELLS, workers: Optional[int] = None,
              **settings) -> SweepResult:
    """Run :func:`~optostirap.pipeline.simulate` on every cell of the axis product.

    Cells are independent; with ``workers > 1`` they run in a process pool.
    Records come back in canonical (row-major over ``axes``) order either
    way. A failing cell is recorded with its error and the sweep continues.
    Extra keyword arguments go to ``simulate``.
    """
    axes = list(axes)
    if not axes:
        raise ConfigError("INVALID_AXIS", "at least one axis is required")
    size = math.prod(len(a.values) for a in axes)
    if size > max_cells:
        raise ConfigError("GRID_TOO_LARGE", f"{size} cells exceed the cap of {max_cells}")
    names = [a.name for a in axes]
    jobs = [(params, schedule, names, values, settings)
            for values in itertools.product(*(a.values for a in axes))]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_cell, jobs))
    else:
        records = [_run_cell(job) for job in jobs]
    return SweepResult(axes, records)


def best_point(result: SweepResult) -> Tuple[float, ...]:
    """Parameter tuple with the largest eta.

    Ties go to the smaller peak middle-mode occupancy, then to the
    lexicographically smaller tuple.
    """
    ok = [r for r in result.records if not r.failed and not math.isnan(r.eta)]
    if not ok:
        raise OptomechError("ALL_FAILED", "no successful cell in the sweep")
    best = min(ok, key=lambda r: (-r.eta, r.peak_n_aM, r.values))
    return best.values
