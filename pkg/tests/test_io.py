"""Parsers, serializers, and round-trip determinism."""

from __future__ import annotations

import io
import json

import pytest

from axpue import (
    ApplicationCategory,
    DeviceCategory,
    EnergyWindow,
    MetricsReport,
    PerformanceRate,
    RateUnit,
    RunMetrics,
    WorkKind,
    load_bundle,
    parse_inventory_json,
    parse_power_csv,
    parse_runs_jsonl,
    read_report,
    write_inventory_json,
    write_power_csv,
    write_report,
    write_runs_jsonl,
)
from axpue.errors import (
    CoverageGapError,
    DuplicateSampleError,
    InvalidPowerError,
    InvalidWindowError,
    ParseError,
    SchemaError,
    UnknownDeviceError,
    ValidationError,
)

HEADER = "device_id,timestamp,watts\n"


def parse_csv(text: str):
    return parse_power_csv(io.StringIO(text))


class TestParsePowerCsv:
    def test_two_samples_one_trace(self):
        traces = parse_csv(HEADER + "s1,0,100\ns1,60,100\n")
        assert len(traces) == 1
        assert list(traces[0].times) == [0.0, 60.0]

    def test_row_order_is_irrelevant(self):
        a = parse_csv(HEADER + "s1,0,100\ns1,60,110\ns2,0,50\n")
        b = parse_csv(HEADER + "s2,0,50\ns1,60,110\ns1,0,100\n")
        assert [t.device_id for t in a] == [t.device_id for t in b]
        for ta, tb in zip(a, b):
            assert list(ta.times) == list(tb.times)
            assert list(ta.watts) == list(tb.watts)

    def test_malformed_timestamp_carries_line(self):
        with pytest.raises(ParseError) as excinfo:
            parse_csv(HEADER + "s1,abc,100\n")
        assert excinfo.value.line == 2

    def test_negative_watts_carries_line(self):
        with pytest.raises(InvalidPowerError) as excinfo:
            parse_csv(HEADER + "s1,0,100\ns1,60,-5\n")
        assert excinfo.value.line == 3

    def test_duplicate_timestamp_rejected(self):
        with pytest.raises(DuplicateSampleError) as excinfo:
            parse_csv(HEADER + "s1,60,100\ns1,60,101\n")
        assert excinfo.value.line == 3

    def test_bad_header_rejected(self):
        with pytest.raises(ParseError) as excinfo:
            parse_csv("device,when,how_much\ns1,0,100\n")
        assert excinfo.value.line == 1

    def test_empty_stream_rejected(self):
        with pytest.raises(ParseError):
            parse_csv("")

    def test_rfc3339_timestamps(self):
        traces = parse_csv(
            HEADER
            + "s1,1970-01-01T00:00:00Z,100\n"
            + "s1,1970-01-01T00:01:00+00:00,200\n"
        )
        assert list(traces[0].times) == [0.0, 60.0]

    def test_wrong_field_count_rejected(self):
        with pytest.raises(ParseError) as excinfo:
            parse_csv(HEADER + "s1,0\n")
        assert excinfo.value.line == 2

    def test_write_parse_round_trip(self):
        rows = [("s1", 0.0, 100.5), ("s1", 61.25, 99.875), ("s2", 0.5, 0.0)]
        traces = parse_csv(write_power_csv(rows).decode("utf-8"))
        assert [t.device_id for t in traces] == ["s1", "s2"]
        assert list(traces[0].watts) == [100.5, 99.875]
        assert list(traces[1].times) == [0.5]


def run_line(**overrides) -> str:
    obj = {
        "run_id": "grep-1",
        "category": "data_analysis",
        "start": 0.0,
        "end": 100.0,
        "work": {"type": "bytes_processed", "value": 10**9},
        "devices": ["s1"],
    }
    obj.update(overrides)
    return json.dumps(obj) + "\n"


class TestParseRunsJsonl:
    def test_valid_line(self):
        runs = parse_runs_jsonl(io.StringIO(run_line()))
        assert len(runs) == 1
        assert runs[0].category is ApplicationCategory.DATA_ANALYSIS
        assert runs[0].work.kind is WorkKind.BYTES_PROCESSED

    def test_work_kind_mismatch_is_schema_error(self):
        line = run_line(category="service")
        with pytest.raises(SchemaError) as excinfo:
            parse_runs_jsonl(io.StringIO(line))
        assert excinfo.value.line == 1

    def test_empty_stream(self):
        assert parse_runs_jsonl(io.StringIO("")) == []

    def test_unknown_category_rejected(self):
        with pytest.raises(SchemaError):
            parse_runs_jsonl(io.StringIO(run_line(category="mining")))

    def test_unknown_work_type_rejected(self):
        with pytest.raises(SchemaError):
            parse_runs_jsonl(io.StringIO(run_line(work={"type": "widgets", "value": 1})))

    def test_inverted_window_carries_line(self):
        stream = io.StringIO(run_line() + run_line(run_id="bad", start=50.0, end=50.0))
        with pytest.raises(InvalidWindowError) as excinfo:
            parse_runs_jsonl(stream)
        assert excinfo.value.line == 2

    def test_integral_float_work_accepted(self):
        runs = parse_runs_jsonl(io.StringIO(run_line(work={"type": "bytes_processed", "value": 1e9})))
        assert runs[0].work.amount == 10**9

    def test_fractional_work_rejected(self):
        with pytest.raises(SchemaError):
            parse_runs_jsonl(
                io.StringIO(run_line(work={"type": "bytes_processed", "value": 1.5}))
            )

    def test_write_parse_round_trip(self):
        runs = parse_runs_jsonl(io.StringIO(run_line()))
        again = parse_runs_jsonl(io.StringIO(write_runs_jsonl(runs).decode("utf-8")))
        assert again == runs


class TestInventoryJson:
    def test_round_trip(self):
        devices = parse_inventory_json(
            '[{"device_id": "s1", "category": "it_equipment", "label": "rack 3"}]'
        )
        assert devices[0].category is DeviceCategory.IT_EQUIPMENT
        again = parse_inventory_json(write_inventory_json(devices).decode("utf-8"))
        assert again == devices

    def test_unknown_category_rejected(self):
        with pytest.raises(SchemaError):
            parse_inventory_json('[{"device_id": "s1", "category": "quantum"}]')

    def test_non_list_rejected(self):
        with pytest.raises(SchemaError):
            parse_inventory_json('{"device_id": "s1"}')


def published_comprehensive_report() -> MetricsReport:
    """Report carrying the exact quotients of the comprehensive workload row."""
    duration = 3600.0
    it_kw, total_kw, rate_kb_s = 100.412, 147.323, 563.271
    window = EnergyWindow(
        0.0,
        duration,
        {
            DeviceCategory.IT_EQUIPMENT: it_kw * 1000.0 * duration,
            DeviceCategory.COOLING: (total_kw - it_kw) * 1000.0 * duration,
        },
    )
    pue = window.total_facility_energy / window.it_energy
    rate = PerformanceRate(rate_kb_s, RateUnit.KB_PER_SECOND)
    row = RunMetrics(
        run_id="BigDataBench",
        category=ApplicationCategory.DATA_ANALYSIS,
        it_power_kw=it_kw,
        facility_power_kw=it_kw * pue,
        performance=rate,
        appue=rate_kb_s / it_kw,
        aopue=rate_kb_s / it_kw / pue,
        weight=1.0,
    )
    return MetricsReport(
        window=window,
        pue=pue,
        per_run=(row,),
        weighted_appue=row.appue,
        aggregated_aopue=row.aopue,
        provenance={"integration_method": "trapezoidal"},
    )


class TestWriteReport:
    def test_csv_matches_published_row(self):
        data = write_report(published_comprehensive_report(), fmt="csv").decode("utf-8")
        lines = data.splitlines()
        assert lines[0] == "workload,it_power_kw,total_facility_power_kw,performance,pue,appue,aopue"
        assert lines[1] == "BigDataBench,100.412,147.323,563.271 KB/s,1.467,5.6096,3.823"

    def test_empty_report_has_window_summary_row(self):
        window = EnergyWindow(
            0.0,
            3600.0,
            {DeviceCategory.IT_EQUIPMENT: 3.6e8, DeviceCategory.COOLING: 1.8e8},
        )
        report = MetricsReport(
            window=window,
            pue=1.5,
            per_run=(),
            weighted_appue=None,
            aggregated_aopue=None,
        )
        lines = write_report(report, fmt="csv").decode("utf-8").splitlines()
        assert len(lines) == 2
        assert lines[1].startswith("(window),100.000,150.000,,1.500")

    def test_json_round_trip_is_byte_identical(self):
        report = published_comprehensive_report()
        first = write_report(report, fmt="json")
        parsed = read_report(first)
        second = write_report(parsed, fmt="json")
        assert first == second

    def test_round_trip_preserves_fields(self):
        report = published_comprehensive_report()
        parsed = read_report(write_report(report))
        assert parsed.pue == report.pue
        assert parsed.per_run == report.per_run
        assert parsed.window == report.window
        assert parsed.weighted_appue == report.weighted_appue

    def test_serialization_is_deterministic(self):
        report = published_comprehensive_report()
        assert write_report(report) == write_report(report)
        assert write_report(report, fmt="csv") == write_report(report, fmt="csv")

    def test_unknown_format_rejected(self):
        with pytest.raises(ValidationError):
            write_report(published_comprehensive_report(), fmt="xml")

    def test_read_rejects_wrong_schema(self):
        with pytest.raises(SchemaError):
            read_report('{"schema": "something-else/9"}')
        with pytest.raises(SchemaError):
            read_report("not json at all")


class TestLoadBundle:
    @staticmethod
    def write_inputs(tmp_path, power_text, runs_text, inventory_text):
        power = tmp_path / "power.csv"
        runs = tmp_path / "runs.jsonl"
        inventory = tmp_path / "inventory.json"
        power.write_text(power_text)
        runs.write_text(runs_text)
        inventory.write_text(inventory_text)
        return power, runs, inventory

    INVENTORY = '[{"device_id": "s1", "category": "it_equipment"}]'

    def test_valid_bundle(self, tmp_path):
        paths = self.write_inputs(
            tmp_path, HEADER + "s1,0,100\ns1,60,100\ns1,100,100\n", run_line(), self.INVENTORY
        )
        bundle = load_bundle(*paths)
        assert len(bundle.traces) == 1
        assert len(bundle.runs) == 1

    def test_unknown_trace_device_rejected(self, tmp_path):
        paths = self.write_inputs(
            tmp_path, HEADER + "ghost,0,100\n", "", self.INVENTORY
        )
        with pytest.raises(UnknownDeviceError):
            load_bundle(*paths)

    def test_run_window_outside_coverage_rejected(self, tmp_path):
        # Samples end at t=100 but the run lasts until t=100 + >max_gap.
        paths = self.write_inputs(
            tmp_path,
            HEADER + "s1,0,100\ns1,60,100\ns1,100,100\n",
            run_line(end=300.0),
            self.INVENTORY,
        )
        with pytest.raises(CoverageGapError):
            load_bundle(*paths, max_gap=60.0)

    def test_run_attributing_unknown_device_rejected(self, tmp_path):
        paths = self.write_inputs(
            tmp_path,
            HEADER + "s1,0,100\ns1,60,100\ns1,100,100\n",
            run_line(devices=["ghost"]),
            self.INVENTORY,
        )
        with pytest.raises(UnknownDeviceError):
            load_bundle(*paths)
