"""Run configuration: a flat TOML document of ``key = value`` pairs.

Every key is optional; missing keys take the defaults below, which are the
transfer-dynamics parameter set. Unknown keys are rejected.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields
from typing import Tuple

from .errors import ConfigError
from .model import PulseSchedule, SystemParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MEANFIELD_MODES = ("quasi-static", "dynamic")
SHIFT_CONVENTIONS = ("normalized", "unnormalized")

_PARAM_KEYS = tuple(f.name for f in fields(SystemParams))
_SCHEDULE_KEYS = {"A": "amplitude", "T": "width", "tau": "half_delay",
                  "t_start": "t_start", "t_end": "t_end"}
_INITIAL_KEYS = ("n0_aL", "n0_aM", "n0_aR", "n0_b1", "n0_b2")
_NONNEG_PARAMS = {"gamma_L", "gamma_M", "gamma_R", "gamma_m1", "gamma_m2", "nbar1", "nbar2"}


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    schedule: PulseSchedule = field(default_factory=PulseSchedule)
    rtol: float = 1e-11
    atol: float = 1e-12
    n_points: int = 601
    initial: Tuple[float, ...] = (0.0, 0.0, 0.0, 1.0, 0.0)
    out_dir: str = "."
    meanfield: str = "quasi-static"
    shift_convention: str = "normalized"
    strict: bool = False
    workers: int = 1
    max_cells: int = 100_000

    @property
    def normalized_shift(self) -> bool:
        return self.shift_convention == "normalized"

    def simulate_kwargs(self) -> dict:
        return dict(n_points=self.n_points, initial=self.initial, meanfield=self.meanfield,
                    rtol=self.rtol, atol=self.atol, normalized_shift=self.normalized_shift)


def _number(key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("INVALID_VALUE", f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("INVALID_VALUE", f"{key} must be finite")
    return value


def _integer(key, value, minimum) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("INVALID_VALUE", f"{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError("INVALID_VALUE", f"{key} must be >= {minimum}")
    return value


def _choice(key, value, options) -> str:
    if value not in options:
        raise ConfigError("INVALID_VALUE", f"{key} must be one of {options}, got {value!r}")
    return value


def from_mapping(doc: dict) -> RunConfig:
    """Build a validated :class:`RunConfig` from a flat mapping."""
    known = set(_PARAM_KEYS) | set(_SCHEDULE_KEYS) | set(_INITIAL_KEYS) | {
        f.name for f in fields(RunConfig)} - {"params", "schedule", "initial"}
    for key in doc:
        if key not in known:
            raise ConfigError("UNKNOWN_KEY", f"unknown key {key!r}")

    p = {}
    for key in _PARAM_KEYS:
        if key in doc:
            p[key] = _number(key, doc[key])
            if key in _NONNEG_PARAMS and p[key] < 0:
                raise ConfigError("INVALID_VALUE", f"{key} must be >= 0")
            if key.startswith("omega_m") and p[key] <= 0:
                raise ConfigError("INVALID_VALUE", f"{key} must be > 0")
    s = {}
    for key, attr in _SCHEDULE_KEYS.items():
        if key in doc:
            s[attr] = _number(key, doc[key])
    if s.get("amplitude", 0.0) < 0:
        raise ConfigError("INVALID_VALUE", "A must be >= 0")
    if "width" in s and s["width"] <= 0:
        raise ConfigError("INVALID_VALUE", "T must be > 0")
    schedule = PulseSchedule(**s)  # raises on an empty window

    base = RunConfig()
    initial = list(base.initial)
    for i, key in enumerate(_INITIAL_KEYS):
        if key in doc:
            initial[i] = _number(key, doc[key])
            if initial[i] < 0:
                raise ConfigError("INVALID_VALUE", f"{key} must be >= 0")

    kw = {}
    for key in ("rtol", "atol"):
        if key in doc:
            kw[key] = _number(key, doc[key])
            if kw[key] <= 0:
                raise ConfigError("INVALID_VALUE", f"{key} must be > 0")
    if "n_points" in doc:
        kw["n_points"] = _integer("n_points", doc["n_points"], 2)
    if "workers" in doc:
        kw["workers"] = _integer("workers", doc["workers"], 1)
    if "max_cells" in doc:
        kw["max_cells"] = _integer("max_cells", doc["max_cells"], 1)
    if "out_dir" in doc:
        if not isinstance(doc["out_dir"], str) or not doc["out_dir"]:
            raise ConfigError("INVALID_VALUE", "out_dir must be a nonempty string")
        kw["out_dir"] = doc["out_dir"]
    if "meanfield" in doc:
        kw["meanfield"] = _choice("meanfield", doc["meanfield"], MEANFIELD_MODES)
    if "shift_convention" in doc:
        kw["shift_convention"] = _choice("shift_convention", doc["shift_convention"],
                                         SHIFT_CONVENTIONS)
    if "strict" in doc:
        if not isinstance(doc["strict"], bool):
            raise ConfigError("INVALID_VALUE", "strict must be true or false")
        kw["strict"] = doc["strict"]
    return RunConfig(params=SystemParams(**p), schedule=schedule, initial=tuple(initial), **kw)


def parse_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("PARSE_ERROR", str(exc)) from None
    for key, value in doc.items():
        if isinstance(value, (dict, list)):
            raise ConfigError("INVALID_VALUE", f"{key} must be a scalar")
    return from_mapping(doc)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, float):
        text = repr(value)
        return text if any(c in text for c in ".en") else text + ".0"
    return str(value)


def to_mapping(config: RunConfig) -> dict:
    doc = {key: getattr(config.params, key) for key in _PARAM_KEYS}
    doc.update({key: getattr(config.schedule, attr) for key, attr in _SCHEDULE_KEYS.items()})
    doc.update(dict(zip(_INITIAL_KEYS, config.initial)))
    for f in fields(RunConfig):
        if f.name not in ("params", "schedule", "initial"):
            doc[f.name] = getattr(config, f.name)
    return doc


def serialize_config(config: RunConfig) -> str:
    """TOML text that :func:`parse_config` maps back to ``config``."""
    return "".join(f"{k} = {_toml_value(v)}\n" for k, v in to_mapping(config).items())
