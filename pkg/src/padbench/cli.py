"""Command-line front end tying simulation, analysis, and replay together.

Subcommands:
    simulate            write seeded RunLog CSVs plus a manifest
    analyze             summary table, Fitts fits, motion accounting
    replay              run an event log through the chord grammar
    calibrate           fit simulator parameters to target statistics
    scenario-validate   check a scenario document
    plotdata            emit plot-ready series (f6..f10) from run CSVs

Exit codes: 0 success, 1 usage error, 2 data error. No wall-clock
seeding anywhere; simulate and calibrate require an explicit --seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from importlib.resources import files as _pkg_files

from . import __version__
from .calibrate import CalibrationTargets, calibrate as _calibrate
from .core import (
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_RELEASE_WINDOW_MS,
    EventLogError,
    PadConfig,
    StreamError,
    parse_events,
    render_actions,
    replay,
)
from .metrics import (
    error_rate,
    exclude_warmup,
    fit_linear,
    learning_curve,
    motion_accounting,
    summarize_conditions,
    summary_table,
    throughput,
    stroke_stats,
)
from .prediction import PROFILES, AccuracyProfile, ScenarioError, load_scenario_file
from .records import CsvError, export_csv, format_float, parse_csv
from .rng import derive_seed
from .usersim import (
    DEFAULT_LEARNING_AMP,
    Params,
    SimCondition,
    load_params,
    simulate_run,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

PARAMS_ENV = "PADBENCH_PARAMS"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the CLI contract reserves 2 for data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


class CliDataError(Exception):
    """Raised by subcommands for problems in input data, not usage."""


def _fail(message: str) -> "CliDataError":
    return CliDataError(message)


# --- shared helpers ---------------------------------------------------------


def _packaged(name: str) -> str:
    return str(_pkg_files("padbench").joinpath("data").joinpath(name))


def _resolve_params(path_flag) -> tuple[Params, str]:
    """--params flag beats PADBENCH_PARAMS beats the packaged defaults."""
    path = path_flag or os.environ.get(PARAMS_ENV) or _packaged("default_params.json")
    try:
        return load_params(path), str(path)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise _fail("cannot load params file %s: %s" % (path, e))


def _load_profile(name: str) -> AccuracyProfile:
    if name in PROFILES:
        return PROFILES[name]
    if os.path.exists(name):
        try:
            with open(name, "r", encoding="utf-8") as f:
                doc = json.load(f)
            return AccuracyProfile(name=doc["name"], p=tuple(doc["p"]))
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise _fail("cannot load profile file %s: %s" % (name, e))
    raise _fail("unknown profile %r (known: %s, or a JSON file)"
                % (name, ", ".join(sorted(PROFILES))))


def _parse_ids(raw: str) -> list[float]:
    try:
        ids = [float(part) for part in raw.split(",") if part != ""]
    except ValueError:
        raise _fail("bad --ids value %r (expected comma-separated numbers)" % raw)
    if not ids or any(i <= 0 for i in ids):
        raise _fail("--ids must list positive difficulty values")
    return ids


def _write_atomic(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)


def _read_logs(paths) -> list:
    """Parse every readable CSV, reporting bad files without stopping."""
    logs = []
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as f:
                logs.append(parse_csv(f.read()))
        except OSError as e:
            print("error: %s: %s" % (path, e), file=sys.stderr)
        except CsvError as e:
            print("error: %s: %s" % (path, e), file=sys.stderr)
    if not logs:
        raise _fail("no parseable input files")
    return logs


def _fits_by_condition(logs) -> dict:
    grouped: dict = {}
    for log in logs:
        grouped.setdefault(log.condition, []).append(log)
    fits = {}
    for condition in sorted(grouped):
        points = [(r.id_bits, r.mt_ms) for lg in grouped[condition] for r in lg.records]
        xs = [p[0] for p in points]
        if len(set(xs)) < 2:
            fits[condition] = None
            continue
        fits[condition] = fit_linear(xs, [p[1] for p in points])
    return fits


# --- simulate ----------------------------------------------------------------


def _cmd_simulate(args) -> int:
    params, params_path = _resolve_params(args.params)
    profile = None
    if args.device == "pad":
        if args.profile is None:
            raise _fail("--device pad requires --profile")
        profile = _load_profile(args.profile)
    elif args.profile is not None:
        raise _fail("--profile only applies to --device pad")
    ids = _parse_ids(args.ids)
    condition = "trackpad" if args.device == "trackpad" else "pad_%s" % profile.name

    os.makedirs(args.out_dir, exist_ok=True)
    outputs = []
    for ii, id_bits in enumerate(ids):
        cond = SimCondition(name=condition, device=args.device,
                            id_bits=id_bits, profile=profile)
        for run_idx in range(args.runs):
            run_seed = derive_seed(args.seed, ii, run_idx)
            log = simulate_run(
                cond, params, run_seed, n_trials=args.trials,
                learning_amp=args.learning_amp,
                run_id="%s_%g_%d" % (condition, id_bits, run_idx),
                release_window_ms=args.window,
            )
            name = "%s_%g_%d.csv" % (condition, id_bits, run_idx)
            text = export_csv(log)
            _write_atomic(os.path.join(args.out_dir, name), text)
            outputs.append({
                "file": name,
                "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
            })

    manifest = {
        "tool": "padbench %s" % __version__,
        "command": "simulate",
        "config": {
            "device": args.device,
            "profile": profile.name if profile else None,
            "ids": ids,
            "trials": args.trials,
            "runs": args.runs,
            "seed": args.seed,
            "learning_amp": args.learning_amp,
            "release_window_ms": args.window,
            "params_file": params_path,
        },
        "outputs": outputs,
    }
    _write_atomic(os.path.join(args.out_dir, "manifest.json"),
                  json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print("wrote %d runs + manifest.json to %s" % (len(outputs), args.out_dir))
    return EXIT_OK


# --- analyze ------------------------------------------------------------------


def _fit_to_dict(fit) -> dict:
    return {
        "slope_ms_per_bit": fit.slope,
        "intercept_ms": fit.intercept,
        "r2": fit.r2,
        "slope_ci95": list(fit.slope_ci95),
        "n": fit.n,
    }


def _motion_to_dict(m) -> dict:
    return {
        "pointer_travel_px": m.pointer_travel_px,
        "saved_px": m.saved_px,
        "accepts": m.accepts,
        "saved_per_accept_px": m.saved_per_accept,
        "clicks": m.clicks,
        "keypresses": m.keypresses,
    }


def _cmd_analyze(args) -> int:
    raw_logs = _read_logs(args.inputs)
    logs = [exclude_warmup(log, args.exclude_warmup) for log in raw_logs]
    logs = [log for log in logs if log.records]
    if not logs:
        raise _fail("warm-up exclusion left no trials to analyze")

    fits = _fits_by_condition(logs)
    grouped: dict = {}
    for log in logs:
        grouped.setdefault(log.condition, []).append(log)
    motion = {c: motion_accounting(g) for c, g in sorted(grouped.items())}
    curve = learning_curve(raw_logs)

    if args.format == "json":
        summaries = summarize_conditions(logs)
        doc = {
            "exclude_warmup": args.exclude_warmup,
            "conditions": {
                c: dict(summaries[c],
                        tp_ci95=list(summaries[c]["tp_ci95"]),
                        error_ci95=list(summaries[c]["error_ci95"]),
                        fit=_fit_to_dict(fits[c]) if fits[c] else None,
                        motion=_motion_to_dict(motion[c]))
                for c in summaries
            },
            "learning_curve": [[j, v] for j, v in curve],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK

    print(summary_table(logs))
    print()
    print("Fitts fit (mt vs ID):")
    for condition, fit in fits.items():
        if fit is None:
            print("  %-14s (single difficulty; no fit)" % condition)
            continue
        print("  %-14s slope %.1f ms/bit [%.1f, %.1f]  intercept %.0f ms  r2 %.3f  n %d"
              % (condition, fit.slope, fit.slope_ci95[0], fit.slope_ci95[1],
                 fit.intercept, fit.r2, fit.n))
    print()
    print("Motion:")
    for condition, m in motion.items():
        per = "-" if m.saved_per_accept is None else "%.0f px" % m.saved_per_accept
        print("  %-14s travel %.0f px  saved %.0f px  accepts %d  saved/accept %s"
              "  clicks %d  keypresses %d"
              % (condition, m.pointer_travel_px, m.saved_px, m.accepts, per,
                 m.clicks, m.keypresses))
    return EXIT_OK


# --- replay -------------------------------------------------------------------


def _cmd_replay(args) -> int:
    try:
        with open(args.events, "r", encoding="utf-8") as f:
            events = parse_events(f.read())
    except OSError as e:
        raise _fail(str(e))
    except EventLogError as e:
        raise _fail("%s: %s" % (args.events, e))
    config = PadConfig(
        release_window_ms=args.window,
        max_candidates=args.max_candidates,
        emit_discard_on_timeout=not args.no_timeout_discard,
    )
    try:
        actions = replay(events, config)
    except StreamError as e:
        # events start on line 2, after the header
        raise _fail("%s: line %d: %s" % (args.events, e.index + 2, e.message))
    text = render_actions(actions)
    if text:
        print(text)
    return EXIT_OK


# --- calibrate ------------------------------------------------------------------


def _cmd_calibrate(args) -> int:
    targets_path = args.targets or _packaged("calibration_targets.json")
    try:
        with open(targets_path, "r", encoding="utf-8") as f:
            targets = CalibrationTargets.from_json(f.read())
    except (OSError, ValueError, KeyError) as e:
        raise _fail("cannot load targets file %s: %s" % (targets_path, e))
    params, residuals = _calibrate(targets, seed=args.seed, n_iter=args.iterations)
    _write_atomic(args.out, params.to_json())
    print("params written to %s" % args.out)
    print("residuals (relative error per target):")
    for key in sorted(residuals):
        print("  %-26s %+7.2f%%" % (key, 100.0 * residuals[key]))
    if args.report:
        _write_atomic(args.report, json.dumps(residuals, indent=2, sort_keys=True) + "\n")
    worst = max(abs(r) for r in residuals.values())
    print("worst |residual|: %.2f%%" % (100.0 * worst))
    return EXIT_OK


# --- scenario-validate -----------------------------------------------------------


def _cmd_scenario_validate(args) -> int:
    try:
        scenario = load_scenario_file(args.scenario)
    except OSError as e:
        raise _fail(str(e))
    except ScenarioError as e:
        raise _fail("%s: %s" % (args.scenario, e))
    print("ok: %d screens, start %r" % (len(scenario.screens), scenario.start))
    return EXIT_OK


# --- plotdata --------------------------------------------------------------------


def _by_condition_and_id(logs) -> dict:
    grouped: dict = {}
    for log in logs:
        for r in log.records:
            grouped.setdefault((log.condition, r.id_bits), []).append(r)
    return grouped


def _plot_rows(figure: str, raw_logs, logs) -> tuple[list[str], list[list]]:
    if figure == "f6":
        return (["ordinal", "normalized_mt"],
                [[j, format_float(v)] for j, v in learning_curve(raw_logs)])

    grouped = _by_condition_and_id(logs)
    if figure == "f7":
        header = ["series", "condition", "id_bits", "mt_ms"]
        rows = []
        for (condition, id_bits), records in sorted(grouped.items()):
            for r in records:
                rows.append(["point", condition, format_float(id_bits),
                             format_float(r.mt_ms)])
        for condition, fit in _fits_by_condition(logs).items():
            if fit is None:
                continue
            ids = sorted({id_bits for (c, id_bits) in grouped if c == condition})
            for x in (ids[0], ids[-1]):
                rows.append(["fit", condition, format_float(x),
                             format_float(fit.intercept + fit.slope * x)])
        return header, rows

    rows = []
    if figure == "f8":
        for (condition, id_bits), records in sorted(grouped.items()):
            tp = throughput([_records_log(records)])
            rows.append([condition, format_float(id_bits), format_float(tp.mean),
                         format_float(tp.ci95[0]), format_float(tp.ci95[1])])
        return ["condition", "id_bits", "mean_tp_bps", "ci_lo", "ci_hi"], rows
    if figure == "f9":
        for (condition, id_bits), records in sorted(grouped.items()):
            st = stroke_stats([_records_log(records)])
            rows.append([condition, format_float(id_bits), format_float(st.mean)])
        return ["condition", "id_bits", "mean_strokes"], rows
    # f10
    for (condition, id_bits), records in sorted(grouped.items()):
        er = error_rate([_records_log(records)])
        rows.append([condition, format_float(id_bits), format_float(er.rate),
                     format_float(er.ci95[0]), format_float(er.ci95[1])])
    return ["condition", "id_bits", "error_rate", "ci_lo", "ci_hi"], rows


def _records_log(records):
    # metrics take RunLogs; wrap a record group in a throwaway one
    from .records import RunLog
    return RunLog(run_id="group", condition="group", device="pad",
                  profile=None, seed=0, records=tuple(records))


def _cmd_plotdata(args) -> int:
    raw_logs = _read_logs(args.inputs)
    logs = [exclude_warmup(log, args.exclude_warmup) for log in raw_logs]
    logs = [log for log in logs if log.records]
    if args.figure != "f6" and not logs:
        raise _fail("warm-up exclusion left no trials to plot")
    header, rows = _plot_rows(args.figure, raw_logs, logs)
    out = [",".join(header)]
    out += [",".join(str(cell) for cell in row) for row in rows]
    print("\n".join(out))
    return EXIT_OK


# --- parser -----------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="padbench",
                     description="Chord-entry benchmark: simulate, analyze, replay.")
    parser.add_argument("--version", action="version",
                        version="padbench %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("simulate", help="simulate seeded runs to CSV files")
    p.add_argument("--device", choices=("trackpad", "pad"), required=True)
    p.add_argument("--profile", default=None,
                   help="accuracy profile for pad: %s, or a JSON file"
                        % "|".join(sorted(PROFILES)))
    p.add_argument("--ids", default="4,5,6",
                   help="comma-separated difficulty values (default 4,5,6)")
    p.add_argument("--trials", type=int, default=22)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, required=True,
                   help="master seed (runs derive their own substreams)")
    p.add_argument("--learning-amp", type=float, default=DEFAULT_LEARNING_AMP)
    p.add_argument("--window", type=float, default=DEFAULT_RELEASE_WINDOW_MS,
                   help="release window in ms (default %d)" % DEFAULT_RELEASE_WINDOW_MS)
    p.add_argument("--params", default=None,
                   help="params file (default: $%s or packaged defaults)" % PARAMS_ENV)
    p.add_argument("--out-dir", default="runs")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="summarize run CSVs")
    p.add_argument("inputs", nargs="+", metavar="CSV")
    p.add_argument("--exclude-warmup", type=int, default=5, metavar="K")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("replay", help="replay an event log through the grammar")
    p.add_argument("events", metavar="EVENTS_FILE")
    p.add_argument("--window", type=int, default=DEFAULT_RELEASE_WINDOW_MS)
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    p.add_argument("--no-timeout-discard", action="store_true")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("calibrate", help="fit simulator params to target stats")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--targets", default=None,
                   help="targets JSON (default: packaged reference values)")
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--out", default="padbench_params.json")
    p.add_argument("--report", default=None, help="also write residuals JSON here")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("scenario-validate", help="check a scenario document")
    p.add_argument("scenario", metavar="SCENARIO_FILE")
    p.set_defaults(func=_cmd_scenario_validate)

    p = sub.add_parser("plotdata", help="emit plot-ready CSV series")
    p.add_argument("--figure", choices=("f6", "f7", "f8", "f9", "f10"), required=True)
    p.add_argument("inputs", nargs="+", metavar="CSV")
    p.add_argument("--exclude-warmup", type=int, default=5, metavar="K")
    p.set_defaults(func=_cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliDataError as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
