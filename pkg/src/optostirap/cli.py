"""Command-line entry point: ``optostirap {simulate,spectrum,sweep,stirap3}``.

Exit status is 0 on success, 2 for configuration or usage errors and 3 for
numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from .config import RunConfig, parse_config
from .errors import ConfigError, NumericalError, OptomechError, PreconditionError
from .model import SystemParams, validate_params
from .pipeline import meanfield_trajectory, simulate
from .spectral import spectral_trajectory, three_level_dark_state
from .sweep import SweepAxis, best_point, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

OCCUPANCY_HEADER = ["t", "n_aL", "n_aM", "n_aR", "n_b1", "n_b2"]
SPECTRUM_HEADER = (["t"] + [f"{p}_l{k}" for k in range(1, 6) for p in ("re", "im")]
                   + ["gap", "re_shift", "im_shift", "g1aL", "g2aR"])


def _fmt(x) -> str:
    return repr(float(x))


def _json_number(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _prepare(config: RunConfig, strict: bool):
    """Validate the physics and create the output directory."""
    report = validate_params(config.params, config.schedule, strict=strict or config.strict)
    if report.errors:
        msg = "; ".join(f"{f.code}: {f.message}" for f in report.errors)
        raise ConfigError("INVALID_VALUE", msg)
    out = Path(config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError("INVALID_VALUE", f"cannot create output directory: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError("INVALID_VALUE", f"output directory {out} is not writable")
    return report, out


def cmd_simulate(config: RunConfig, strict: bool = False) -> int:
    report, out = _prepare(config, strict)
    res = simulate(config.params, config.schedule, with_spectrum=True, **config.simulate_kwargs())
    occ = res.moments.occupancies
    _write_csv(out / "occupancies.csv", OCCUPANCY_HEADER,
               ([_fmt(t)] + [_fmt(v) for v in row] for t, row in zip(res.moments.times, occ)))
    summary = dict(eta=_json_number(res.eta), peak_n_aM=_json_number(res.peak_n_aM),
                   min_gap=_json_number(res.min_gap),
                   integrated_shift=_json_number(res.integrated_shift),
                   runtime=res.runtime, validation=report.as_dicts())
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    print(f"simulate: eta={res.eta:.6g} peak_n_aM={res.peak_n_aM:.3g} "
          f"runtime={res.runtime:.2f}s -> {out}")
    return EXIT_OK


def _inset_params(params: SystemParams) -> SystemParams:
    """Decay rates for the dark-eigenvalue shift: the configured ones, or the
    transfer-dynamics defaults when the configuration is decay-free."""
    if params.has_decay():
        return params
    d = SystemParams()
    return params.replace(gamma_L=d.gamma_L, gamma_M=d.gamma_M, gamma_R=d.gamma_R,
                          gamma_m1=d.gamma_m1, gamma_m2=d.gamma_m2)


def cmd_spectrum(config: RunConfig, strict: bool = False) -> int:
    _, out = _prepare(config, strict)
    grid = config.schedule.grid(config.n_points)
    mft = meanfield_trajectory(config.params, config.schedule, grid, config.meanfield, config.rtol)
    spec = spectral_trajectory(config.params, config.schedule, mft,
                               shift_params=_inset_params(config.params),
                               normalized=config.normalized_shift)
    order = spec.report_order()
    rows = []
    for i, t in enumerate(spec.times):
        vals = spec.eigenvalues[i, order]
        row = [_fmt(t)]
        for v in vals:
            row += [_fmt(v.real), _fmt(v.imag)]
        s = spec.decay_shift[i]
        row += [_fmt(spec.gap[i]), _fmt(s.real), _fmt(s.imag),
                _fmt(spec.couplings[i, 0].real), _fmt(spec.couplings[i, 1].real)]
        rows.append(row)
    _write_csv(out / "spectrum.csv", SPECTRUM_HEADER, rows)
    print(f"spectrum: {len(rows)} points, adiabatic gap={spec.adiabatic_gap():.6g} -> {out}")
    return EXIT_OK


def cmd_sweep(config: RunConfig, axes: List[SweepAxis], strict: bool = False) -> int:
    if not axes:
        raise ConfigError("INVALID_AXIS", "sweep needs at least one --axis")
    _, out = _prepare(config, strict)
    result = run_sweep(config.params, config.schedule, axes, max_cells=config.max_cells,
                       workers=config.workers, **config.simulate_kwargs())
    names = result.names
    header = names + ["eta", "peak_n_aM", "min_gap", "integrated_shift", "error"]
    rows = [[_fmt(v) for v in r.values]
            + [_fmt(r.eta), _fmt(r.peak_n_aM), _fmt(r.min_gap), _fmt(r.integrated_shift),
               r.error or ""]
            for r in result.records]
    _write_csv(out / "sweep.csv", header, rows)
    try:
        best = best_point(result)
    except OptomechError:
        best = None
    if best is not None:
        rec = next(r for r in result.records if r.values == best)
        payload = dict(zip(names, best))
        payload.update(eta=_json_number(rec.eta), peak_n_aM=_json_number(rec.peak_n_aM))
    else:
        payload = dict(error="ALL_FAILED")
    with open(out / "best.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    failed = sum(r.failed for r in result.records)
    print(f"sweep: {len(result.records)} cells, {failed} failed -> {out}")
    if best is None:
        raise NumericalError("ALL_FAILED", "every sweep cell failed")
    return EXIT_OK


def cmd_stirap3(omega_p: float, omega_s: float, delta_p: float, delta_s: float) -> int:
    state, value = three_level_dark_state(omega_p, omega_s, delta_p, delta_s)
    json.dump(dict(eigenvalue=float(value), state=[float(x) for x in state]), sys.stdout)
    sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optostirap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "spectrum", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML run configuration (defaults if omitted)")
        p.add_argument("--out", help="output directory (overrides out_dir)")
        p.add_argument("--strict", action="store_true", help="treat validation warnings as errors")
        if name == "sweep":
            p.add_argument("--axis", action="append", default=[], metavar="NAME=V1,V2,...")
    p = sub.add_parser("stirap3")
    p.add_argument("--omega-p", type=float, required=True)
    p.add_argument("--omega-s", type=float, required=True)
    p.add_argument("--delta-p", type=float, default=0.0)
    p.add_argument("--delta-s", type=float, default=0.0)
    return parser


def _load_config(path: Optional[str], out: Optional[str]) -> RunConfig:
    text = ""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("PARSE_ERROR", f"cannot read {path}: {exc}") from None
    config = parse_config(text)
    if out is not None:
        config = replace(config, out_dir=out)
    return config


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "stirap3":
            return cmd_stirap3(args.omega_p, args.omega_s, args.delta_p, args.delta_s)
        config = _load_config(args.config, args.out)
        if args.command == "simulate":
            return cmd_simulate(config, args.strict)
        if args.command == "spectrum":
            return cmd_spectrum(config, args.strict)
        axes = [SweepAxis.parse(spec) for spec in args.axis]
        return cmd_sweep(config, axes, args.strict)
    except (ConfigError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OptomechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # numerical library failures surface here
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
