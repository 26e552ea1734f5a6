"""Command-line front end: single runs, parameter sweeps, bundled presets.

Owns the CSV result schema. One ResultRow per evaluated config: the full
config echo in external units, every aggregate metric, the diagnostic means,
wall-clock seconds, and the code version. Output is RFC-4180 CSV (UTF-8,
header row, '.' decimal separator); floats are written with repr so a row
parses back to the exact binary values. wall_seconds is the one column
excluded from the byte-identity determinism guarantee.
"""

import argparse
import csv
import dataclasses
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import (FIGURE_IDS, KEY_ORDER, ConfigError, SimulationConfig,
                     _INT_KEYS, _STR_KEYS, config_from_raw, derive_point_seed,
                     external_items, figure_preset, load_config,
                     parse_config_text, validate)
from .metrics import MetricsReport
from .simulate import default_jobs, run_simulation

__all__ = [
    "SweepSpec",
    "parse_sweep_text",
    "sweep_points",
    "result_row",
    "RESULT_COLUMNS",
    "SCHEMES",
    "AXIS_TO_KEY",
    "FIGURE_AXES",
    "main",
]

SCHEMES = ("single", "noncoherent", "coherent")

AXIS_TO_KEY = {
    "r_c": "r_c_m",
    "alpha1": "alpha1",
    "lambda_u": "lambda_u_per_km2",
    "lambda_b": "lambda_b_per_km2",
    "f_c": "f_c_hz",
    "n_coop": "n_coop",
    "theta": "theta",
}

FIGURE_AXES = {
    "fig3": "r_c",
    "fig4": "alpha1",
    "fig5": "lambda_u",
    "fig6": "lambda_b",
    "fig7": "f_c",
    "fig8": "n_coop",
}

# n_drops is both a config key and a report field with the same meaning and
# value; the config echo keeps the column so the header stays duplicate-free.
_METRIC_COLUMNS = tuple(f.name for f in dataclasses.fields(MetricsReport)
                        if f.name not in KEY_ORDER)
RESULT_COLUMNS = (("point_index", "axis", "schemes")
                  + KEY_ORDER + ("tau",)
                  + _METRIC_COLUMNS
                  + ("wall_seconds", "version"))


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis over a base config, with the schemes to report."""
    base: SimulationConfig
    axis: str
    values: tuple
    schemes: tuple = SCHEMES


_SWEEP_KEYS = ("axis", "values", "schemes")


def parse_sweep_text(text: str) -> SweepSpec:
    """Parse a sweep file: base config lines plus axis/values/schemes lines."""
    reserved: dict[str, str] = {}
    base_lines = []
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        key = stripped.partition("=")[0].strip() if "=" in stripped else None
        if key in _SWEEP_KEYS:
            if key in reserved:
                errors.append(f"line {lineno}: repeated key {key!r}")
            reserved[key] = stripped.partition("=")[2].strip()
        else:
            base_lines.append(line)
    try:
        base_raw = parse_config_text("\n".join(base_lines))
    except ConfigError as exc:
        errors.extend(exc.errors)
        base_raw = {}

    axis = reserved.get("axis", "")
    if axis not in AXIS_TO_KEY:
        errors.append(f"axis must be one of {sorted(AXIS_TO_KEY)}, got {axis!r}")
    values: tuple = ()
    raw_values = [v.strip() for v in reserved.get("values", "").split(",") if v.strip()]
    if not raw_values:
        errors.append("values must be a non-empty comma-separated list")
    else:
        try:
            parsed = [int(v) if axis == "n_coop" else float(v) for v in raw_values]
        except ValueError:
            errors.append(f"values are not all numeric: {reserved.get('values')!r}")
        else:
            if any(b <= a for a, b in zip(parsed, parsed[1:])):
                errors.append("values must be strictly increasing")
            values = tuple(parsed)
    schemes = SCHEMES
    if "schemes" in reserved:
        schemes = tuple(s.strip() for s in reserved["schemes"].split(",") if s.strip())
        bad = [s for s in schemes if s not in SCHEMES]
        if bad or not schemes:
            errors.append(f"schemes must be a non-empty subset of {list(SCHEMES)}, "
                          f"got {reserved['schemes']!r}")
    if axis in AXIS_TO_KEY and AXIS_TO_KEY[axis] in base_raw:
        errors.append(f"base config sets {AXIS_TO_KEY[axis]!r}, which the sweep "
                      "axis overrides point by point; drop one of them")
    if errors:
        raise ConfigError(errors)
    return SweepSpec(base=validate(config_from_raw(base_raw)),
                     axis=axis, values=values, schemes=schemes)


def sweep_points(spec: SweepSpec) -> list[SimulationConfig]:
    """Per-point configs: axis value applied, seed derived from (base, index)."""
    key = AXIS_TO_KEY[spec.axis]
    raw_base = dict(external_items(spec.base))
    configs = []
    for index, value in enumerate(spec.values):
        raw = dict(raw_base)
        raw[key] = value
        raw["seed"] = derive_point_seed(spec.base.seed, index)
        configs.append(validate(config_from_raw(raw)))
    return configs


def _fmt(value) -> str:
    if isinstance(value, float):
        # Coerce float subclasses (e.g. numpy scalars) so repr stays the
        # plain decimal form that round-trips exactly through float().
        return repr(float(value))
    return str(value)


def result_row(config: SimulationConfig, report: MetricsReport,
               wall_seconds: float, point_index: int = 0, axis: str = "",
               schemes=SCHEMES) -> dict[str, str]:
    """One CSV row, keyed by RESULT_COLUMNS, all values already formatted."""
    row = {
        "point_index": str(point_index),
        "axis": axis,
        "schemes": ";".join(schemes),
        "tau": repr(config.path_loss.tau),
        "wall_seconds": repr(float(wall_seconds)),
        "version": __version__,
    }
    for key, value in external_items(config):
        row[key] = _fmt(value)
    for name in _METRIC_COLUMNS:
        row[name] = _fmt(getattr(report, name))
    return row


def write_rows(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _evaluate(config: SimulationConfig, jobs: int, point_index: int,
              axis: str, schemes) -> dict[str, str]:
    start = time.perf_counter()
    report = run_simulation(config, jobs)
    wall = time.perf_counter() - start
    return result_row(config, report, wall, point_index, axis, schemes)


def _parse_overrides(pairs) -> dict:
    raw = {}
    errors = []
    for item in pairs or ():
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"--set expects key=value, got {item!r}")
            continue
        value = value.strip()
        if key in _STR_KEYS or key not in KEY_ORDER:
            # unknown keys flow through so config_from_raw names them
            raw[key] = value
            continue
        try:
            raw[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            errors.append(f"cannot parse value for {key!r}: {value!r}")
    if errors:
        raise ConfigError(errors)
    return raw


def _cmd_run(args) -> int:
    overrides = _parse_overrides(args.set)
    if args.config is not None:
        config = load_config(args.config, overrides)
    else:
        config = validate(config_from_raw(overrides))
    jobs = args.jobs if args.jobs else default_jobs()
    row = _evaluate(config, jobs, point_index=0, axis="", schemes=SCHEMES)
    write_rows(args.out, [row])
    print(f"wrote {args.out} (1 row)", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = parse_sweep_text(fh.read())
    jobs = args.jobs if args.jobs else default_jobs()
    rows = [
        _evaluate(config, jobs, point_index=i, axis=spec.axis, schemes=spec.schemes)
        for i, config in enumerate(sweep_points(spec))
    ]
    write_rows(args.out, rows)
    print(f"wrote {args.out} ({len(rows)} rows)", file=sys.stderr)
    return 0


def _manifest(figure_id: str, configs, base_seed: int) -> dict:
    return {
        "figure": figure_id,
        "axis": FIGURE_AXES[figure_id],
        "version": __version__,
        "base_seed": base_seed,
        "grid_origin": "bundled preset; axis values are artifact choices",
        "n_points": len(configs),
        "points": [
            {"point_index": i, **dict(external_items(cfg))}
            for i, cfg in enumerate(configs)
        ],
    }


def _cmd_reproduce(args) -> int:
    figures = list(FIGURE_IDS) if args.figure == "all" else [args.figure]
    unknown = [f for f in figures if f not in FIGURE_IDS]
    if unknown:
        raise ConfigError([f"unknown figure id {f!r}, expected one of "
                           f"{list(FIGURE_IDS) + ['all']}" for f in unknown])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = args.jobs if args.jobs else default_jobs()
    for figure_id in figures:
        configs = figure_preset(figure_id, n_drops=args.drops, base_seed=args.seed)
        axis = FIGURE_AXES[figure_id]
        rows = [_evaluate(cfg, jobs, point_index=i, axis=axis, schemes=SCHEMES)
                for i, cfg in enumerate(configs)]
        write_rows(out_dir / f"{figure_id}.csv", rows)
        manifest_path = out_dir / f"{figure_id}_manifest.json"
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(_manifest(figure_id, configs, args.seed), fh,
                      indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {out_dir / (figure_id + '.csv')} ({len(rows)} rows) "
              f"and {manifest_path.name}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udncoop",
        description="Monte Carlo link-level study of joint transmission in "
                    "ultra-dense networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate one config, write one CSV row")
    p_run.add_argument("--config", help="key=value config file (defaults if omitted)")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (external units); repeatable")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.add_argument("--jobs", type=int, default=0,
                       help="worker processes (default: UDNCOOP_JOBS or all cores)")

    p_sweep = sub.add_parser("sweep", help="evaluate a swept axis, one row per value")
    p_sweep.add_argument("--spec", required=True,
                         help="sweep file: base config keys plus axis=, values=, schemes=")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--jobs", type=int, default=0,
                         help="worker processes (default: UDNCOOP_JOBS or all cores)")

    p_rep = sub.add_parser("reproduce",
                           help="run a bundled preset sweep and write CSV + manifest")
    p_rep.add_argument("--figure", required=True,
                       help=f"one of {', '.join(FIGURE_IDS)} or 'all'")
    p_rep.add_argument("--out", required=True, help="output directory")
    p_rep.add_argument("--drops", type=int, default=None,
                       help="override the per-point drop count")
    p_rep.add_argument("--seed", type=int, default=42,
                       help="base seed for per-point derivation")
    p_rep.add_argument("--jobs", type=int, default=0,
                       help="worker processes (default: UDNCOOP_JOBS or all cores)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "reproduce": _cmd_reproduce}
    try:
        return handler[args.command](args)
    except ConfigError as exc:
        for problem in exc.errors:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
