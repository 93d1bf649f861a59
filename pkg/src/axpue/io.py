"""Ingestion and serialization of telemetry, runs, inventories, and reports.

File formats (UTF-8 throughout):

* power samples: CSV with exact header ``device_id,timestamp,watts``;
  timestamps are epoch seconds or RFC 3339 strings and are normalized to
  epoch seconds at parse time.
* runs: JSON lines, one object per line with keys ``run_id``, ``category``,
  ``start``, ``end``, ``work`` (``{"type": ..., "value": ...}``) and
  ``devices``.
* inventory: JSON list of ``{"device_id", "category", "label"}`` objects.
* report: JSON document (machine round-trip, field-exact) or a CSV table
  with columns workload, IT power (kW), total facility power (kW),
  performance (+unit), PUE, ApPUE, AoPUE.

Serialization is deterministic: stable key order, ``\\n`` line endings, and
shortest round-tripping float representations.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable

from .errors import (
    DuplicateSampleError,
    InvalidPowerError,
    InvalidWindowError,
    ParseError,
    SchemaError,
    UnknownDeviceError,
    ValidationError,
)
from .integrate import DEFAULT_MAX_GAP, PowerTrace, check_coverage
from .model import (
    ApplicationCategory,
    ApplicationRun,
    DeviceCategory,
    DeviceRecord,
    EnergyWindow,
    Inventory,
    MetricsReport,
    PerformanceRate,
    RateUnit,
    RunMetrics,
    WorkKind,
    WorkMeasure,
    validate_inventory,
)

POWER_CSV_HEADER = ("device_id", "timestamp", "watts")
REPORT_SCHEMA = "axpue-report/1"
REPORT_CSV_HEADER = (
    "workload",
    "it_power_kw",
    "total_facility_power_kw",
    "performance",
    "pue",
    "appue",
    "aopue",
)


def _parse_timestamp(text: str) -> float:
    """Epoch seconds from a numeric literal or an RFC 3339 string."""
    try:
        return float(text)
    except ValueError:
        pass
    iso = text.strip()
    if iso.endswith(("Z", "z")):
        iso = iso[:-1] + "+00:00"
    moment = datetime.fromisoformat(iso)
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment.timestamp()


def parse_power_csv(stream: IO[str] | Iterable[str]) -> list[PowerTrace]:
    """Parse power samples into one trace per device, sorted by device_id.

    Rows may arrive in any order; each device's samples are sorted by time.
    Duplicate (device, timestamp) pairs, malformed rows, and negative watt
    readings are rejected with the offending 1-based line number.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty power CSV: missing header", line=1) from None
    if tuple(h.strip() for h in header) != POWER_CSV_HEADER:
        raise ParseError(
            f"expected header {','.join(POWER_CSV_HEADER)!r}, got {','.join(header)!r}",
            line=1,
        )
    by_device: dict[str, list[tuple[float, float, int]]] = {}
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=line)
        device_id = row[0].strip()
        if not device_id:
            raise ParseError("empty device_id", line=line)
        try:
            timestamp = _parse_timestamp(row[1])
        except (ValueError, OverflowError):
            raise ParseError(f"bad timestamp {row[1]!r}", line=line) from None
        try:
            watts = float(row[2])
        except ValueError:
            raise ParseError(f"bad watts value {row[2]!r}", line=line) from None
        if not math.isfinite(watts) or watts < 0:
            raise InvalidPowerError(
                f"device {device_id!r}: watts must be finite and >= 0, got {watts!r}",
                line=line,
            )
        if not math.isfinite(timestamp):
            raise ParseError(f"non-finite timestamp {row[1]!r}", line=line)
        by_device.setdefault(device_id, []).append((timestamp, watts, line))
    traces = []
    for device_id in sorted(by_device):
        rows = sorted(by_device[device_id], key=lambda r: (r[0], r[2]))
        for (t0, _, l0), (t1, _, l1) in zip(rows, rows[1:]):
            if t0 == t1:
                raise DuplicateSampleError(
                    f"device {device_id!r}: duplicate timestamp {t0!r}",
                    line=max(l0, l1),
                )
        traces.append(
            PowerTrace(
                device_id,
                [r[0] for r in rows],
                [r[1] for r in rows],
            )
        )
    return traces


def write_power_csv(samples: Iterable[tuple[str, float, float]]) -> bytes:
    """Serialize (device_id, timestamp, watts) rows; inverse of the parser."""
    out = _stdio.StringIO()
    out.write(",".join(POWER_CSV_HEADER) + "\n")
    for device_id, timestamp, watts in samples:
        out.write(f"{device_id},{float(timestamp)!r},{float(watts)!r}\n")
    return out.getvalue().encode("utf-8")


def _run_from_obj(obj: dict, line: int) -> ApplicationRun:
    for key in ("run_id", "category", "start", "end", "work", "devices"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", line=line)
    try:
        category = ApplicationCategory(obj["category"])
    except ValueError:
        raise SchemaError(f"unknown category {obj['category']!r}", line=line) from None
    work_obj = obj["work"]
    if not isinstance(work_obj, dict) or "type" not in work_obj or "value" not in work_obj:
        raise SchemaError("work must be an object with 'type' and 'value'", line=line)
    try:
        kind = WorkKind(work_obj["type"])
    except ValueError:
        raise SchemaError(f"unknown work type {work_obj['type']!r}", line=line) from None
    value = work_obj["value"]
    if isinstance(value, float):
        if not value.is_integer():
            raise SchemaError(f"work value must be an integer, got {value!r}", line=line)
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"work value must be an integer, got {value!r}", line=line)
    devices = obj["devices"]
    if not isinstance(devices, list) or not all(isinstance(d, str) for d in devices):
        raise SchemaError("devices must be a list of device ids", line=line)
    try:
        start = obj["start"] if isinstance(obj["start"], (int, float)) else _parse_timestamp(obj["start"])
        end = obj["end"] if isinstance(obj["end"], (int, float)) else _parse_timestamp(obj["end"])
    except (ValueError, OverflowError, TypeError):
        raise SchemaError("bad start/end timestamp", line=line) from None
    if end <= start:
        raise InvalidWindowError(
            f"run {obj['run_id']!r}: end ({end}) must be > start ({start})", line=line
        )
    try:
        return ApplicationRun(
            run_id=obj["run_id"],
            category=category,
            start=float(start),
            end=float(end),
            work=WorkMeasure(kind=kind, amount=value),
            attributed_devices=frozenset(devices),
        )
    except ValidationError as exc:
        raise SchemaError(str(exc), line=line) from exc


def parse_runs_jsonl(stream: IO[str] | Iterable[str]) -> list[ApplicationRun]:
    """Parse one JSON object per line into validated runs (blank lines skipped)."""
    runs = []
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line=line_no) from exc
        if not isinstance(obj, dict):
            raise SchemaError("each line must be a JSON object", line=line_no)
        runs.append(_run_from_obj(obj, line_no))
    return runs


def write_runs_jsonl(runs: Iterable[ApplicationRun]) -> bytes:
    out = _stdio.StringIO()
    for run in runs:
        obj = {
            "run_id": run.run_id,
            "category": run.category.value,
            "start": run.start,
            "end": run.end,
            "work": {"type": run.work.kind.value, "value": run.work.amount},
            "devices": sorted(run.attributed_devices),
        }
        out.write(json.dumps(obj, sort_keys=True) + "\n")
    return out.getvalue().encode("utf-8")


def parse_inventory_json(stream: IO[str] | str) -> list[DeviceRecord]:
    """Parse a JSON device list; unknown categories are schema errors."""
    text = stream if isinstance(stream, str) else stream.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, list):
        raise SchemaError("inventory must be a JSON list of device objects")
    devices = []
    for i, obj in enumerate(data):
        if not isinstance(obj, dict) or "device_id" not in obj or "category" not in obj:
            raise SchemaError(f"inventory entry {i}: need device_id and category")
        try:
            category = DeviceCategory(obj["category"])
        except ValueError:
            raise SchemaError(
                f"inventory entry {i}: unknown category {obj['category']!r}"
            ) from None
        devices.append(
            DeviceRecord(
                device_id=obj["device_id"],
                category=category,
                label=obj.get("label", ""),
            )
        )
    return devices


def write_inventory_json(devices: Iterable[DeviceRecord]) -> bytes:
    data = [
        {"device_id": d.device_id, "category": d.category.value, "label": d.label}
        for d in devices
    ]
    return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")


def format_quantity(value: float) -> str:
    """Three-decimal display used for powers, PUE, AoPUE, and rates."""
    return f"{value:.3f}"


def format_appue(value: float) -> str:
    """ApPUE display: four decimals at or above 1, three below."""
    return f"{value:.4f}" if value >= 1 else f"{value:.3f}"


def _report_to_obj(report: MetricsReport) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "window": {
            "start": report.window.start,
            "end": report.window.end,
            "energy_joules_by_category": {
                cat.value: report.window.energy_by_category[cat]
                for cat in DeviceCategory
            },
        },
        "pue": report.pue,
        "per_run": [
            {
                "run_id": row.run_id,
                "category": row.category.value,
                "it_power_kw": row.it_power_kw,
                "facility_power_kw": row.facility_power_kw,
                "performance": {
                    "value": row.performance.value,
                    "unit": row.performance.unit.value,
                },
                "appue": row.appue,
                "aopue": row.aopue,
                "weight": row.weight,
            }
            for row in report.per_run
        ],
        "weighted_appue": report.weighted_appue,
        "aggregated_aopue": report.aggregated_aopue,
        "provenance": dict(report.provenance),
    }


def report_csv_row(row: RunMetrics, pue: float) -> list[str]:
    magnitude, unit = row.performance.reported()
    return [
        row.run_id,
        format_quantity(row.it_power_kw),
        format_quantity(row.facility_power_kw),
        f"{format_quantity(magnitude)} {unit}",
        format_quantity(pue),
        format_appue(row.appue),
        format_quantity(row.aopue),
    ]


def _report_to_csv(report: MetricsReport) -> str:
    out = _stdio.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REPORT_CSV_HEADER)
    if report.per_run:
        for row in report.per_run:
            writer.writerow(report_csv_row(row, report.pue))
    else:
        duration = report.window.duration
        writer.writerow(
            [
                "(window)",
                format_quantity(report.window.it_energy / duration / 1000.0),
                format_quantity(report.window.total_facility_energy / duration / 1000.0),
                "",
                format_quantity(report.pue),
                "",
                "",
            ]
        )
    return out.getvalue()


def write_report(report: MetricsReport, fmt: str = "json") -> bytes:
    """Serialize a report deterministically as JSON or a results-table CSV."""
    if fmt == "json":
        text = json.dumps(_report_to_obj(report), sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        text = _report_to_csv(report)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")
    return text.encode("utf-8")


def read_report(data: bytes | str) -> MetricsReport:
    """Parse a JSON report back into a validated :class:`MetricsReport`."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON report: {exc.msg}") from exc
    if not isinstance(obj, dict) or obj.get("schema") != REPORT_SCHEMA:
        raise SchemaError(f"not a {REPORT_SCHEMA} document")
    try:
        window = EnergyWindow(
            start=obj["window"]["start"],
            end=obj["window"]["end"],
            energy_by_category={
                DeviceCategory(cat): joules
                for cat, joules in obj["window"]["energy_joules_by_category"].items()
            },
        )
        per_run = tuple(
            RunMetrics(
                run_id=row["run_id"],
                category=ApplicationCategory(row["category"]),
                it_power_kw=row["it_power_kw"],
                facility_power_kw=row["facility_power_kw"],
                performance=PerformanceRate(
                    value=row["performance"]["value"],
                    unit=RateUnit(row["performance"]["unit"]),
                ),
                appue=row["appue"],
                aopue=row["aopue"],
                weight=row["weight"],
            )
            for row in obj["per_run"]
        )
        return MetricsReport(
            window=window,
            pue=obj["pue"],
            per_run=per_run,
            weighted_appue=obj["weighted_appue"],
            aggregated_aopue=obj["aggregated_aopue"],
            provenance=obj.get("provenance", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed report document: {exc}") from exc


@dataclass(frozen=True)
class ScenarioBundle:
    """Parsed and cross-validated inputs of one computation."""

    inventory: Inventory
    traces: tuple[PowerTrace, ...]
    runs: tuple[ApplicationRun, ...]
    window: tuple[float, float] | None


def load_bundle(
    power_path: str | Path,
    runs_path: str | Path,
    inventory_path: str | Path,
    window: tuple[float, float] | None = None,
    max_gap: float = DEFAULT_MAX_GAP,
) -> ScenarioBundle:
    """Load and cross-validate the three input files of a computation.

    Checks that all referenced device ids resolve and that every run window
    lies within its devices' trace coverage under ``max_gap``.
    """
    with open(inventory_path, "r", encoding="utf-8") as f:
        inventory = validate_inventory(parse_inventory_json(f))
    with open(power_path, "r", encoding="utf-8", newline="") as f:
        traces = parse_power_csv(f)
    with open(runs_path, "r", encoding="utf-8") as f:
        runs = parse_runs_jsonl(f)
    for trace in traces:
        if trace.device_id not in inventory:
            raise UnknownDeviceError(f"device {trace.device_id!r} not in inventory")
    trace_by_device = {t.device_id: t for t in traces}
    for run in runs:
        for device_id in sorted(run.attributed_devices):
            if device_id not in inventory:
                raise UnknownDeviceError(
                    f"run {run.run_id!r} attributes unknown device {device_id!r}"
                )
            trace = trace_by_device.get(device_id)
            if trace is not None:
                check_coverage(trace, run.start, run.end, max_gap)
    return ScenarioBundle(
        inventory=inventory,
        traces=tuple(traces),
        runs=tuple(runs),
        window=window,
    )
