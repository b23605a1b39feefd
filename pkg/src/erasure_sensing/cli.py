"""Command-line front end.

Subcommands: `fisher` (closed-form and numeric Fisher information),
`simulate` (one full comparison run from a JSON config), `scaling`
(instability versus error rate), `optimize` (interrogation-time
optimization and erasure-conversion gain), `ellipse` (fit a CSV of
excitation pairs), and `allan` (Allan deviation of a raw series).

Every command writes a RunManifest into the output directory, atomically
and after all other outputs, so a manifest is a success marker and a
complete record for reproducing the run. Numeric output uses full
round-trip precision. Exit codes: 0 success, 2 usage or config error,
3 numerical singularity, 4 simulation degeneracy, 5 fit failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .clock import (
    ComparisonConfig,
    SimulationDegeneracyError,
    allan_deviation,
    comparison_stats,
    erasure_conversion_gain_curve,
    fit_fixed_form_intercept,
    fit_loglog_exponent,
    instability_vs_error_rate,
    invalid_fraction,
    phase_series_to_fractional_frequency,
    run_comparison,
    valid_pairs,
)
from .estimation import (
    EllipseFitError,
    ellipse_fit,
    load_pairs_csv,
    phase_series_from_cycles,
)
from .fisher import (
    DegenerateStateError,
    SingularFisherError,
    channel_outcome_model,
    classical_fisher_numeric,
    fisher_dephasing,
    fisher_depolarizing,
    fisher_erasure,
)
from .states import ChannelKind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SINGULAR = 3
EXIT_DEGENERATE = 4
EXIT_FIT = 5

# Fixed default seed: deterministic-by-default runs for CI and scripting.
DEFAULT_SEED = 20260823
OUTPUT_ENV_VAR = "ERASURE_SENSING_OUT"

_FIXED_EXPONENTS = {ChannelKind.ERASURE: -0.5, ChannelKind.DEPOLARIZING: -1.0}


def _fmt(value: float) -> str:
    """Full round-trip decimal representation."""
    return repr(float(value))


def _resolve_outdir(arg_out: str | None) -> Path:
    if arg_out is not None:
        out = Path(arg_out)
    elif os.environ.get(OUTPUT_ENV_VAR):
        out = Path(os.environ[OUTPUT_ENV_VAR])
    else:
        out = Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json_atomic(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def _write_manifest(
    outdir: Path,
    command: str,
    config: dict,
    seed: int | None,
    outputs: list[str],
    started: float,
    stats: dict | None = None,
) -> Path:
    payload = {
        "command": command,
        "version": __version__,
        "config": config,
        "seed": seed,
        "outputs": outputs,
        "duration_seconds": time.monotonic() - started,
    }
    if stats is not None:
        payload["stats"] = stats
    path = outdir / f"{command}_manifest.json"
    _write_json_atomic(path, payload)
    return path


def _load_config(path: str) -> ComparisonConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from None
    return ComparisonConfig.from_dict(data)


def _parse_grid(text: str, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ValueError(f"{what} must be a comma-separated list of numbers") from None
    if not values:
        raise ValueError(f"{what} is empty")
    return values


def _write_cycles_csv(path: Path, results) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("cycle,theta,x_a,x_b,n_a,n_b\n")
        for r in results:
            if not r.valid:
                continue
            fh.write(
                f"{r.index},{_fmt(r.theta)},{_fmt(r.x_a)},{_fmt(r.x_b)},"
                f"{r.n_a},{r.n_b}\n"
            )


def cmd_fisher(args) -> int:
    started = time.monotonic()
    kind = ChannelKind(args.kind)
    if not 0.0 <= args.q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    delta = args.phi - args.theta
    if kind is ChannelKind.DEPOLARIZING:
        analytic = fisher_depolarizing(args.q, delta)
    elif kind is ChannelKind.DEPHASING:
        analytic = fisher_dephasing(args.q, delta)
    else:
        analytic = fisher_erasure(args.q, delta)

    if args.numeric:
        model = channel_outcome_model(kind, args.q, args.theta)
        numeric = classical_fisher_numeric(model, args.phi, step=args.step)
        print(f"analytic {_fmt(analytic)}")
        print(f"numeric {_fmt(numeric)}")
        print(f"difference {_fmt(numeric - analytic)}")
    else:
        print(_fmt(analytic))

    outdir = _resolve_outdir(args.out)
    _write_manifest(
        outdir,
        "fisher",
        {
            "kind": kind.value,
            "q": args.q,
            "phi": args.phi,
            "theta": args.theta,
            "numeric": bool(args.numeric),
            "step": args.step,
        },
        None,
        [],
        started,
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.monotonic()
    config = _load_config(args.config)
    outdir = _resolve_outdir(args.out)

    results = run_comparison(config, threads=args.threads)
    bad = invalid_fraction(results)
    if bad > 0.10:
        raise SimulationDegeneracyError(
            f"{bad:.1%} of cycles lost every atom; the configuration is degenerate"
        )

    pairs = valid_pairs(results)
    series = phase_series_from_cycles(pairs, args.window)
    y = phase_series_to_fractional_frequency(series, config.t_c, config.f0)
    allan = allan_deviation(y, cycle_time=args.window * config.cycle_time)

    cycles_path = outdir / "cycles.csv"
    _write_cycles_csv(cycles_path, results)
    phases_path = outdir / "phases.csv"
    with open(phases_path, "w", newline="") as fh:
        fh.write("window,phi_d\n")
        for k, value in enumerate(series):
            fh.write(f"{k},{_fmt(value)}\n")
    allan_path = outdir / "allan.json"
    _write_json_atomic(allan_path, allan.to_dict())

    stats = comparison_stats(results, config.n0)
    stats["window"] = args.window
    stats["sigma_one_window"] = float(allan.sigmas[0])
    stats["sigma_one_window_error"] = float(allan.errors[0])
    _write_manifest(
        outdir,
        "simulate",
        config.to_dict(),
        config.seed,
        [cycles_path.name, phases_path.name, allan_path.name],
        started,
        stats=stats,
    )
    print(f"sigma_one_window {_fmt(allan.sigmas[0])}")
    return EXIT_OK


def cmd_scaling(args) -> int:
    started = time.monotonic()
    base = _load_config(args.config)
    outdir = _resolve_outdir(args.out)

    if args.kind == "both":
        kinds = [ChannelKind.ERASURE, ChannelKind.DEPOLARIZING]
    else:
        kind = ChannelKind(args.kind)
        if kind not in _FIXED_EXPONENTS:
            raise ValueError(
                "scaling curves are defined for the erasure and depolarizing "
                "channels (or 'both')"
            )
        kinds = [kind]

    grid = sorted(_parse_grid(args.q_grid, "--q-grid"))
    for q in grid:
        if not 0.0 <= q <= 0.95:
            raise ValueError(f"--q-grid entries must lie in [0, 0.95], got {q}")

    curves = {}
    fits = {}
    for kind in kinds:
        points = instability_vs_error_rate(
            base, grid, kind, window=args.window, threads=args.threads
        )
        curves[kind] = points
        if len(points) >= 3:
            exponent, stderr, sigma0 = fit_loglog_exponent(
                [p.q for p in points], [p.sigma for p in points]
            )
            fixed = _FIXED_EXPONENTS[kind]
            fits[kind.value] = {
                "exponent": exponent,
                "exponent_stderr": stderr,
                "sigma0_free": sigma0,
                "fixed_exponent": fixed,
                "sigma0_fixed_form": fit_fixed_form_intercept(
                    [p.q for p in points], [p.sigma for p in points], fixed
                ),
            }

    csv_path = outdir / "scaling.csv"
    with open(csv_path, "w", newline="") as fh:
        header = ["q"]
        for kind in kinds:
            header += [f"sigma_{kind.value}", f"err_{kind.value}"]
        fh.write(",".join(header) + "\n")
        for i, q in enumerate(grid):
            row = [_fmt(q)]
            for kind in kinds:
                row += [_fmt(curves[kind][i].sigma), _fmt(curves[kind][i].sigma_err)]
            fh.write(",".join(row) + "\n")
    fit_path = outdir / "scaling_fit.json"
    _write_json_atomic(fit_path, fits)

    _write_manifest(
        outdir,
        "scaling",
        {
            "base_config": base.to_dict(),
            "q_grid": grid,
            "kind": args.kind,
            "window": args.window,
        },
        base.seed,
        [csv_path.name, fit_path.name],
        started,
    )
    for kind in kinds:
        for p in curves[kind]:
            print(f"{kind.value} q {_fmt(p.q)} sigma {_fmt(p.sigma)}")
    for name, fit in fits.items():
        print(
            f"{name} exponent {_fmt(fit['exponent'])} "
            f"+/- {_fmt(fit['exponent_stderr'])}"
        )
    return EXIT_OK


def cmd_optimize(args) -> int:
    started = time.monotonic()
    if args.gamma <= 0.0:
        raise ValueError("--gamma must be positive")
    grid = _parse_grid(args.dead_time_grid, "--dead-time-grid")
    for t_d in grid:
        if t_d < 0.0:
            raise ValueError("--dead-time-grid entries must be non-negative")
    grid = sorted(grid)
    curve = erasure_conversion_gain_curve(args.gamma, grid)

    outdir = _resolve_outdir(args.out)
    csv_path = outdir / "optimize.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("T_d,T_c_star_depolarizing,T_c_star_erasure,gain\n")
        for point in curve:
            fh.write(
                f"{_fmt(point.t_d)},{_fmt(point.t_c_star_depolarizing)},"
                f"{_fmt(point.t_c_star_erasure)},{_fmt(point.gain)}\n"
            )
    _write_manifest(
        outdir,
        "optimize",
        {"gamma": args.gamma, "dead_time_grid": grid},
        None,
        [csv_path.name],
        started,
    )
    for point in curve:
        print(f"{_fmt(point.t_d)} {_fmt(point.gain)}")
    return EXIT_OK


def cmd_ellipse(args) -> int:
    started = time.monotonic()
    pairs = load_pairs_csv(args.points)
    result = ellipse_fit(pairs, min_points=args.min_points)
    payload = result.to_dict()
    print(json.dumps(payload, indent=2))

    outdir = _resolve_outdir(args.out)
    json_path = outdir / "ellipse.json"
    _write_json_atomic(json_path, payload)
    _write_manifest(
        outdir,
        "ellipse",
        {"points": str(args.points), "min_points": args.min_points},
        None,
        [json_path.name],
        started,
    )
    return EXIT_OK


def cmd_allan(args) -> int:
    started = time.monotonic()
    if args.cycle_time <= 0.0:
        raise ValueError("--cycle-time must be positive")
    try:
        with open(args.series) as fh:
            values = [
                float(line) for line in (ln.strip() for ln in fh) if line
            ]
    except OSError as exc:
        raise ValueError(f"cannot read series {args.series}: {exc}") from None
    except ValueError:
        raise ValueError(
            f"series file {args.series} must hold one number per line"
        ) from None
    result = allan_deviation(values, cycle_time=args.cycle_time)
    payload = result.to_dict()
    print(json.dumps(payload, indent=2))

    outdir = _resolve_outdir(args.out)
    json_path = outdir / "allan.json"
    _write_json_atomic(json_path, payload)
    _write_manifest(
        outdir,
        "allan",
        {"series": str(args.series), "cycle_time": args.cycle_time},
        None,
        [json_path.name],
        started,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasure-sensing",
        description=(
            "Fisher-information bounds and differential-clock Monte Carlo "
            "for erasure, depolarizing, and dephasing noise. Angles are "
            "radians everywhere."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"erasure-sensing {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_out(p):
        p.add_argument(
            "--out",
            default=None,
            help=(
                "output directory (default: $" + OUTPUT_ENV_VAR + " if set, "
                "else the current directory)"
            ),
        )

    p = sub.add_parser("fisher", help="Fisher information of one channel")
    p.add_argument("kind", choices=[k.value for k in ChannelKind])
    p.add_argument("-q", "--q", type=float, required=True, help="error probability")
    p.add_argument("--phi", type=float, default=0.0, help="true phase (radians)")
    p.add_argument("--theta", type=float, default=0.0, help="readout basis (radians)")
    p.add_argument(
        "--numeric",
        action="store_true",
        help="also evaluate the central-difference oracle and print the difference",
    )
    p.add_argument("--step", type=float, default=1e-5, help="finite-difference step")
    add_out(p)
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("simulate", help="run one comparison from a JSON config")
    p.add_argument("config", help="ComparisonConfig JSON file (all fields explicit)")
    p.add_argument("--window", type=int, default=100, help="cycles per ellipse fit")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    add_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scaling", help="instability versus error rate")
    p.add_argument("config", help="base ComparisonConfig JSON file")
    p.add_argument(
        "--kind",
        default="both",
        choices=["erasure", "depolarizing", "both"],
        help="which channel(s) to sweep",
    )
    p.add_argument(
        "--q-grid",
        default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8",
        help="comma-separated error rates in [0, 0.95]",
    )
    p.add_argument("--window", type=int, default=100, help="cycles per ellipse fit")
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    add_out(p)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("optimize", help="interrogation-time optimization and gain")
    p.add_argument("--gamma", type=float, required=True, help="decay rate (1/s)")
    p.add_argument(
        "--dead-time-grid",
        default="0",
        help="comma-separated dead times in seconds",
    )
    add_out(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("ellipse", help="fit an ellipse to an x_a,x_b CSV")
    p.add_argument("points", help="CSV file with header x_a,x_b")
    p.add_argument("--min-points", type=int, default=6)
    add_out(p)
    p.set_defaults(func=cmd_ellipse)

    p = sub.add_parser("allan", help="Allan deviation of a raw series file")
    p.add_argument("series", help="text file, one fractional-frequency value per line")
    p.add_argument(
        "--cycle-time", type=float, required=True, help="sample spacing in seconds"
    )
    add_out(p)
    p.set_defaults(func=cmd_allan)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SingularFisherError, DegenerateStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except SimulationDegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except EllipseFitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
