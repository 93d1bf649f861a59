"""Command-line frontend: simulate scenarios, compute reports, merge reports.

Exit codes: 0 success, 2 validation or schema error, 3 data-coverage error
(missing samples or a gap wider than max_gap).  Diagnostics go to stderr,
data to stdout or the requested output path.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import math
import sys
from pathlib import Path

from .engine import analyze
from .errors import AxpueError, CoverageGapError, InvalidWindowError, NoSamplesError
from .integrate import DEFAULT_MAX_GAP
from .io import (
    REPORT_CSV_HEADER,
    format_appue,
    format_quantity,
    load_bundle,
    read_report,
    report_csv_row,
    write_report,
)
from .model import MetricsReport
from .simulate import builtin_scenario, scenario_from_manifest, simulate

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COVERAGE = 3

BUILTIN_PREFIX = "paper:"


def _parse_window(text: str) -> tuple[float, float]:
    try:
        start_text, end_text = text.split(",")
        start, end = float(start_text), float(end_text)
    except ValueError:
        raise InvalidWindowError(
            f"window must be 'start,end' with numeric bounds, got {text!r}"
        ) from None
    if end <= start:
        raise InvalidWindowError(f"window end ({end}) must be > start ({start})")
    return start, end


def _emit(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(out).write_bytes(data)


def cmd_compute(args: argparse.Namespace) -> int:
    window = _parse_window(args.window) if args.window else None
    bundle = load_bundle(
        args.power, args.runs, args.inventory, window=window, max_gap=args.max_gap
    )
    report = analyze(
        bundle.traces,
        bundle.inventory,
        bundle.runs,
        window=bundle.window,
        max_gap=args.max_gap,
    )
    _emit(write_report(report, fmt=args.format), args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.scenario.startswith(BUILTIN_PREFIX):
        scenario = builtin_scenario(
            args.scenario[len(BUILTIN_PREFIX):], data_gb=args.data_gb
        )
    else:
        scenario = scenario_from_manifest(Path(args.scenario).read_bytes())
    if args.seed is not None:
        from dataclasses import replace

        scenario = replace(scenario, seed=args.seed)
    paths = simulate(scenario).write_to(args.out)
    print(
        f"wrote {', '.join(str(p) for p in paths.values())}",
        file=sys.stderr,
    )
    return EXIT_OK


def _merged_rows(reports: list[MetricsReport]) -> tuple[list[list[str]], list[list[str]]]:
    """Per-run table rows plus long-format (workload, metric, value) rows."""
    table: list[list[str]] = []
    series: list[list[str]] = []
    for report in reports:
        for row in report.per_run:
            table.append(report_csv_row(row, report.pue))
            series.append([row.run_id, "pue", repr(report.pue)])
            series.append([row.run_id, "appue", repr(row.appue)])
            series.append([row.run_id, "aopue", repr(row.aopue)])
    return table, series


def _aggregate_row(reports: list[MetricsReport]) -> list[str] | None:
    rows = [row for report in reports for row in report.per_run]
    if len(rows) < 2:
        return None
    it_total = math.fsum(r.it_power_kw for r in rows)
    facility_total = math.fsum(r.facility_power_kw for r in rows)
    out = [
        "(aggregate)",
        format_quantity(it_total),
        format_quantity(facility_total),
        "",
        format_quantity(facility_total / it_total) if it_total > 0 else "",
        "",
        "",
    ]
    units = {r.performance.reported()[1] for r in rows}
    if len(units) > 1 or it_total <= 0:
        if len(units) > 1:
            print(
                "warning: performance units differ across runs "
                f"({', '.join(sorted(units))}); aggregate ApPUE/AoPUE left blank",
                file=sys.stderr,
            )
        return out
    weights = [r.it_power_kw / it_total for r in rows]
    weighted_appue = math.fsum(r.appue * w for r, w in zip(rows, weights))
    weighted_aopue = math.fsum(r.aopue * w for r, w in zip(rows, weights))
    out[5] = format_appue(weighted_appue)
    out[6] = format_quantity(weighted_aopue)
    return out


def cmd_report(args: argparse.Namespace) -> int:
    reports = [read_report(Path(path).read_bytes()) for path in args.files]
    table, series = _merged_rows(reports)
    aggregate = _aggregate_row(reports)
    out = _stdio.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    writer.writerows(table)
    if aggregate is not None:
        writer.writerow(aggregate)
    _emit(out.getvalue().encode("utf-8"), args.out)

    series_path = args.series
    if series_path is None and args.out not in (None, "-"):
        series_path = str(Path(args.out).with_suffix(".series.csv"))
    if series_path is not None:
        series_out = _stdio.StringIO()
        writer = csv.writer(series_out, lineterminator="\n")
        writer.writerow(["workload", "metric", "value"])
        writer.writerows(series)
        Path(series_path).write_bytes(series_out.getvalue().encode("utf-8"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="axpue",
        description="Application-level power usage effectiveness metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser(
        "compute", help="compute a metrics report from telemetry, runs, and inventory"
    )
    compute.add_argument("--power", required=True, help="power samples CSV")
    compute.add_argument("--runs", required=True, help="application runs JSONL")
    compute.add_argument("--inventory", required=True, help="device inventory JSON")
    compute.add_argument("--window", help="explicit report window 'start,end' (epoch s)")
    compute.add_argument(
        "--max-gap",
        type=float,
        default=DEFAULT_MAX_GAP,
        help="largest tolerated sample spacing in seconds (default %(default)s)",
    )
    compute.add_argument("--format", choices=("json", "csv"), default="json")
    compute.add_argument("--out", help="output path (default stdout)")
    compute.set_defaults(func=cmd_compute)

    sim = sub.add_parser(
        "simulate", help="emit synthetic telemetry for a built-in or manifest scenario"
    )
    sim.add_argument(
        "scenario",
        help="'paper:<name>' (bigdatabench, svm, sort, grep, linpack, sort1, sort2) "
        "or a scenario manifest path",
    )
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, help="override the scenario seed")
    sim.add_argument(
        "--data-gb", type=float, help="data size override for sort1/sort2"
    )
    sim.set_defaults(func=cmd_simulate)

    rep = sub.add_parser("report", help="merge JSON reports into a results table")
    rep.add_argument("files", nargs="+", help="JSON report files")
    rep.add_argument("--out", help="merged CSV path (default stdout)")
    rep.add_argument(
        "--series",
        help="long-format series CSV path (default: derived from --out)",
    )
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CoverageGapError, NoSamplesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    except AxpueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
