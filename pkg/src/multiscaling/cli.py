"""Command-line front end.

Subcommands: generate, surrogate, estimate, tails, experiment, plotdata.
Exit codes: 0 success, 2 usage error, 3 data error, 4 estimation error.
Every subcommand accepts --seed; when omitted and randomness is needed, a
seed is drawn from entropy and printed so the run can be replayed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import LagWindow, MasterSeed, QGrid, Series
from .errors import (DataError, DomainError, EstimationError,
                     MultiscalingError, UsageError)
from .estimators import estimate_ghe, fit_log_autocovariance, fit_tail
from .experiments import ExperimentPlan, run_experiment, surrogate_battery
from .generators import MrwParams, TbmParams, gen_bm, gen_mrw, gen_tbm, \
    theory_spectrum
from .ingest import IngestSpec, ingest, write_series
from .reports import (emit_plot_data, estimate_report, experiment_table,
                      load_report, tails_report, write_plot_csv, write_report)
from .surrogates import gaussianize, shuffle


def parse_window(text: str) -> LagWindow:
    try:
        lo, hi = text.split(":")
        return LagWindow(int(lo), int(hi))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad window {text!r}, expected MIN:MAX") from exc


def parse_windows(text: str) -> tuple[LagWindow, ...]:
    return tuple(parse_window(part) for part in text.split(","))


def parse_qgrid(text: str) -> QGrid:
    try:
        start, step, stop = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad qgrid {text!r}, expected START:STEP:STOP") from exc
    if step <= 0 or stop < start:
        raise UsageError(f"bad qgrid {text!r}")
    count = int(round((stop - start) / step)) + 1
    return QGrid(np.round(start + step * np.arange(count), 12))


def parse_theory(text: str):
    name, _, arg = text.partition(":")
    if name == "bm":
        return theory_spectrum("bm")
    if name == "tbm":
        return theory_spectrum("tbm", n=float(arg))
    if name == "mrw":
        return theory_spectrum("mrw", lambda2=float(arg))
    raise UsageError(f"bad theory spec {text!r}, expected bm|tbm:N|mrw:LAMBDA2")


def resolve_seed(args) -> MasterSeed:
    if getattr(args, "seed", None) is not None:
        return MasterSeed(args.seed)
    seed = MasterSeed.from_entropy()
    print(f"# seed drawn from entropy: {seed.seed}", file=sys.stderr)
    return seed


def _column(text):
    return int(text) if text.lstrip("-").isdigit() else text


def load_input(args) -> Series:
    spec = IngestSpec(path=args.input, column=_column(args.column),
                      date_column=(_column(args.date_column)
                                   if args.date_column else None),
                      transform=args.transform)
    return ingest(spec)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    seed = resolve_seed(args)
    if args.model == "bm":
        series = gen_bm(args.length, seed, args.realization)
    elif args.model == "tbm":
        if args.df is None:
            raise UsageError("--df is required for the tbm model")
        series = gen_tbm(TbmParams(n=args.df, length=args.length), seed,
                         args.realization)
    else:
        series = gen_mrw(MrwParams(lambda2=args.lambda2, L=args.corr_length,
                                   sigma=args.sigma, dt=args.dt,
                                   length=args.length), seed, args.realization)
    write_series(series, args.out)
    return 0


def cmd_surrogate(args) -> int:
    seed = resolve_seed(args)
    series = load_input(args)
    fn = shuffle if args.method == "shuffle" else gaussianize
    out = Path(args.out)
    if args.reps == 1:
        write_series(fn(series, seed.stream(0)), out)
        return 0
    stem, suffix = out.stem, out.suffix or ".csv"
    for k in range(args.reps):
        write_series(fn(series, seed.stream(k)),
                     out.with_name(f"{stem}_{k:03d}{suffix}"))
    return 0


def cmd_estimate(args) -> int:
    series = load_input(args)
    window = parse_window(args.window)
    grid = parse_qgrid(args.qgrid)
    result = estimate_ghe(series, window, grid,
                          overlapping=not args.no_overlap)
    cov = None
    if args.cov or args.cov_tmax is not None:
        cov = fit_log_autocovariance(series, t_max=args.cov_tmax)
    spectrum = parse_theory(args.theory) if args.theory else None
    report = estimate_report(result, cov=cov, spectrum=spectrum,
                             label=series.label)
    if args.out:
        write_report(report, args.out)
    else:
        json.dump(report, sys.stdout, indent=1)
        print()
    return 0


def cmd_tails(args) -> int:
    series = load_input(args)
    sides = ("left", "right") if args.side == "both" else (args.side,)
    fits = {side: fit_tail(series, side) for side in sides}
    report = tails_report(fits, label=series.label)
    if args.out:
        write_report(report, args.out)
    else:
        json.dump(report, sys.stdout, indent=1)
        print()
    for side in sides:
        tf = fits[side]
        print(f"{side}: alpha={tf.alpha:.4f} +- {tf.stderr_alpha:.4f} "
              f"(xmin={tf.xmin:.6g}, tail n={tf.tail_count}, "
              f"KS={tf.ks_distance:.4f})", file=sys.stderr)
    return 0


def load_plan(path: str, seed: MasterSeed) -> tuple[ExperimentPlan, str | None]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read plan {path}: {exc}") from exc
    qgrid = raw.get("qgrid")
    if isinstance(qgrid, str):
        grid = parse_qgrid(qgrid)
    elif qgrid:
        grid = QGrid(np.asarray(qgrid, dtype=float))
    else:
        grid = QGrid()
    windows = raw.get("windows") or ["1:19", "30:250"]
    if isinstance(windows, str):
        windows = windows.split(",")
    plan_seed = MasterSeed(raw["seed"]) if "seed" in raw else seed
    plan = ExperimentPlan(
        model=raw.get("model"),
        params={k: float(v) for k, v in (raw.get("params") or {}).items()},
        surrogate=raw.get("surrogate", "none"),
        realizations=int(raw.get("realizations", 100)),
        length=int(raw["length"]) if raw.get("length") else None,
        windows=tuple(parse_window(str(w).replace("[", "").replace("]", ""))
                      if isinstance(w, str) else LagWindow(int(w[0]), int(w[1]))
                      for w in windows),
        grid=grid,
        seed=plan_seed,
        input_path=raw.get("input"),
        overlapping=bool(raw.get("overlapping", True)))
    return plan, raw.get("input")


def cmd_experiment(args) -> int:
    seed = resolve_seed(args)
    out = Path(args.out)
    if args.plan:
        plan, input_path = load_plan(args.plan, seed)
        base = None
        if input_path is not None:
            base = ingest(IngestSpec(path=input_path,
                                     transform=args.transform,
                                     column=_column(args.column)))
        report = run_experiment(plan, base_series=base, threads=args.threads)
        payload = report.to_dict()
        cols, rows = experiment_table(payload)
    else:
        if not args.battery:
            raise UsageError("experiment needs --plan FILE or --battery INPUT")
        args.input = args.battery
        series = load_input(args)
        battery = surrogate_battery(series, reps=args.reps,
                                    windows=parse_windows(args.windows),
                                    grid=parse_qgrid(args.qgrid),
                                    seed=seed, threads=args.threads)
        payload = battery.to_dict()
        cols, rows = _battery_table(payload)
    write_report(payload, out.with_suffix(".json"))
    write_plot_csv(cols, rows, out.with_suffix(".csv"))
    return 0


def _battery_table(payload: dict) -> tuple[list[str], list[dict]]:
    cols = ["series", "window", "statistic", "mean", "std", "theory", "z"]
    rows = []
    for window, stats in payload["plain"].items():
        for name, value in stats.items():
            rows.append({"series": "plain", "window": window,
                         "statistic": name, "mean": value, "std": None,
                         "theory": None, "z": None})
    for section in ("shuffled", "gaussianized", "matched_tbm"):
        _, part = experiment_table(payload[section])
        for row in part:
            rows.append({"series": section, **row})
    return cols, rows


def cmd_plotdata(args) -> int:
    report = load_report(args.report)
    cols, rows = emit_plot_data(report, args.kind)
    out = Path(args.out)
    write_plot_csv(cols, rows, out.with_suffix(".csv"))
    if not args.no_png:
        from . import plots
        plots.render(args.kind, rows, out.with_suffix(".png"))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (drawn from entropy if omitted)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for ensemble runs")
    ingest_opts = argparse.ArgumentParser(add_help=False)
    ingest_opts.add_argument("--column", default="0",
                             help="value column, by index or header name")
    ingest_opts.add_argument("--date-column", default=None,
                             help="optional date column used to order rows")
    ingest_opts.add_argument("--transform", default=None,
                             choices=["log_returns", "raw_increments", "levels"],
                             help="how to turn the column into increments "
                                  "(default: from the file's kind header, "
                                  "else log_returns)")

    parser = argparse.ArgumentParser(
        prog="multiscaling",
        description="Generate, transform and measure uni/multi-scaling "
                    "time series.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="synthesize a series and write it as CSV")
    p.add_argument("--model", required=True, choices=["bm", "tbm", "mrw"])
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--df", type=float, default=None,
                   help="degrees of freedom (tbm)")
    p.add_argument("--lambda2", type=float, default=0.03,
                   help="intermittency parameter squared (mrw)")
    p.add_argument("--corr-length", type=float, default=1000.0,
                   help="autocorrelation length L (mrw)")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--realization", type=int, default=0,
                   help="substream index under the master seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("surrogate", parents=[common, ingest_opts],
                       help="shuffle or rank-Gaussianize a series")
    p.add_argument("input")
    p.add_argument("--method", required=True,
                   choices=["shuffle", "gaussianize"])
    p.add_argument("--reps", type=int, default=1,
                   help="emit this many surrogate files")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surrogate)

    p = sub.add_parser("estimate", parents=[common, ingest_opts],
                       help="scaling exponents over one lag window")
    p.add_argument("input")
    p.add_argument("--window", default="1:19", help="lag range MIN:MAX")
    p.add_argument("--qgrid", default="0.1:0.1:1.0",
                   help="moment orders START:STEP:STOP")
    p.add_argument("--no-overlap", action="store_true",
                   help="use disjoint instead of overlapping increments")
    p.add_argument("--cov", action="store_true",
                   help="also fit the log-volatility autocovariance")
    p.add_argument("--cov-tmax", type=int, default=None,
                   help="max lag for the autocovariance fit")
    p.add_argument("--theory", default=None,
                   help="attach an oracle: bm | tbm:N | mrw:LAMBDA2")
    p.add_argument("--out", default=None, help="report JSON path")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("tails", parents=[common, ingest_opts],
                       help="power-law tail exponents")
    p.add_argument("input")
    p.add_argument("--side", default="both", choices=["left", "right", "both"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("experiment", parents=[common, ingest_opts],
                       help="Monte Carlo ensemble from a plan file, or the "
                            "full surrogate battery on a real series")
    p.add_argument("--plan", default=None, help="JSON plan file")
    p.add_argument("--battery", default=None, metavar="INPUT",
                   help="run shuffle/gaussianize/matched-t battery on INPUT")
    p.add_argument("--reps", type=int, default=100,
                   help="battery repetitions")
    p.add_argument("--windows", default="1:19,30:250",
                   help="comma-separated lag windows for the battery")
    p.add_argument("--qgrid", default="0.1:0.1:1.0")
    p.add_argument("--out", required=True,
                   help="basename for the .json and .csv reports")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plotdata", parents=[common],
                       help="tidy CSV (and PNG) for one curve kind")
    p.add_argument("report", help="JSON report from estimate/tails/experiment")
    p.add_argument("--kind", required=True,
                   choices=["zeta_vs_q", "moments_loglog", "tail_ccdf",
                            "cov_curve"])
    p.add_argument("--out", required=True,
                   help="basename for the .csv (and .png) output")
    p.add_argument("--no-png", action="store_true",
                   help="skip rendering the figure")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except EstimationError as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 4
    except MultiscalingError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
