"""Power usage effectiveness metrics.

PUE is total facility energy over IT equipment energy for a window.  ApPUE
is an application's performance rate over its average IT power; AoPUE is the
same rate over average total facility power, which makes AoPUE = ApPUE / PUE
an identity every report must satisfy row-wise.  Multi-application ApPUE is
the weight-averaged per-run value, with weights proportional to per-run IT
power.

Powers are carried in kilowatts and rates in reporting units so that ApPUE
and AoPUE are numerically the plain quotients a reader would form from a
results table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    InvalidWindowError,
    NoRunsError,
    NoSamplesError,
    SharedDeviceConflictError,
    ShapeMismatchError,
    UnitMismatchError,
    UnknownDeviceError,
    ValidationError,
    ZeroFacilityPowerError,
    ZeroITEnergyError,
    ZeroITPowerError,
)
from .integrate import DEFAULT_MAX_GAP, PowerTrace, category_energy, integrate_power
from .model import (
    IDENTITY_REL_TOL,
    ApplicationRun,
    DeviceCategory,
    EnergyWindow,
    Inventory,
    MetricsReport,
    PerformanceRate,
    RunMetrics,
)
from .performance import compute_performance

#: Allowed relative overshoot of summed per-run IT energy vs. the window's.
ATTRIBUTION_SLACK = 1e-6


@dataclass(frozen=True)
class RunInput:
    """One run plus its attributed IT energy and measured performance."""

    run: ApplicationRun
    it_energy_joules: float
    rate: PerformanceRate

    def __post_init__(self):
        if self.it_energy_joules < 0 or not math.isfinite(self.it_energy_joules):
            raise ValidationError(
                f"run {self.run.run_id!r}: IT energy must be finite and >= 0"
            )

    @property
    def it_power_kw(self) -> float:
        return self.it_energy_joules / self.run.duration / 1000.0


@dataclass(frozen=True)
class MetricInputs:
    """Everything needed to build one report: a window plus per-run inputs."""

    window: EnergyWindow
    runs: tuple[RunInput, ...]

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        attributed = math.fsum(r.it_energy_joules for r in self.runs)
        budget = self.window.it_energy * (1.0 + ATTRIBUTION_SLACK)
        if attributed > budget:
            raise ValidationError(
                f"per-run IT energy ({attributed} J) exceeds the window's "
                f"IT energy ({self.window.it_energy} J)"
            )


def compute_pue(window: EnergyWindow) -> float:
    """Total facility energy over IT energy; >= 1 by construction."""
    if window.it_energy == 0:
        raise ZeroITEnergyError("window holds no IT equipment energy")
    return window.total_facility_energy / window.it_energy


def compute_appue(rate: PerformanceRate, it_power_kw: float) -> float:
    """Performance rate (reporting units) per kW of average IT power."""
    if it_power_kw <= 0:
        raise ZeroITPowerError(f"IT power must be > 0 kW, got {it_power_kw!r}")
    magnitude, _ = rate.reported()
    return magnitude / it_power_kw


def compute_aopue(rate: PerformanceRate, facility_power_kw: float) -> float:
    """Performance rate (reporting units) per kW of average facility power."""
    if facility_power_kw <= 0:
        raise ZeroFacilityPowerError(
            f"facility power must be > 0 kW, got {facility_power_kw!r}"
        )
    magnitude, _ = rate.reported()
    return magnitude / facility_power_kw


def compute_weights(it_powers_kw: Sequence[float]) -> list[float]:
    """Per-run weights: each run's share of the summed IT power."""
    if len(it_powers_kw) == 0:
        raise NoRunsError("cannot weight an empty run list")
    for p in it_powers_kw:
        if p < 0 or not math.isfinite(p):
            raise ValidationError(f"IT power must be finite and >= 0, got {p!r}")
    total = math.fsum(it_powers_kw)
    if total == 0:
        raise ZeroITPowerError("all runs have zero IT power")
    return [p / total for p in it_powers_kw]


def aggregate_appue(
    appues: Sequence[float],
    weights: Sequence[float],
    units: Sequence[str] | None = None,
) -> float:
    """Weighted ApPUE across runs: sum of ApPUE_i * weight_i.

    When ``units`` is given, all runs must share one performance unit;
    mixing units makes the aggregate meaningless.
    """
    if len(appues) != len(weights):
        raise ShapeMismatchError(
            f"{len(appues)} ApPUE values vs {len(weights)} weights"
        )
    if units is not None and len(units) != len(appues):
        raise ShapeMismatchError(f"{len(appues)} ApPUE values vs {len(units)} units")
    if not appues:
        raise NoRunsError("cannot aggregate an empty run list")
    if units is not None and len(set(units)) > 1:
        raise UnitMismatchError(
            f"cannot aggregate across performance units {sorted(set(units))!r}"
        )
    for w in weights:
        if w < 0 or not math.isfinite(w):
            raise ValidationError(f"weights must be finite and >= 0, got {w!r}")
    total = math.fsum(weights)
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"weights sum to {total!r}, expected 1 +/- 1e-9")
    value = math.fsum(a * w for a, w in zip(appues, weights))
    # A convex combination lies in [min, max] mathematically; clamp the
    # one-ulp rounding spill so the invariant holds for the float too.
    return min(max(value, min(appues)), max(appues))


def verify_identity(appue: float, pue: float, aopue: float) -> bool:
    """Check AoPUE = ApPUE / PUE within the report tolerance (pue must be > 0)."""
    if pue <= 0:
        return False
    return abs(aopue - appue / pue) <= IDENTITY_REL_TOL * max(1.0, abs(aopue))


def build_report(
    inputs: MetricInputs, provenance: dict[str, object] | None = None
) -> MetricsReport:
    """Assemble a full report from one window plus per-run inputs.

    Per-run facility power is the run's IT power scaled by the window PUE
    (facility overhead attributed proportionally to IT power), which makes
    the AoPUE = ApPUE / PUE identity exact row-wise and equals the measured
    facility power whenever a run spans the whole window.
    """
    pue = compute_pue(inputs.window)
    weights = (
        compute_weights([r.it_power_kw for r in inputs.runs]) if inputs.runs else []
    )
    rows = []
    for run_input, weight in zip(inputs.runs, weights):
        it_kw = run_input.it_power_kw
        appue = compute_appue(run_input.rate, it_kw)
        facility_kw = it_kw * pue
        aopue = compute_aopue(run_input.rate, facility_kw)
        rows.append(
            RunMetrics(
                run_id=run_input.run.run_id,
                category=run_input.run.category,
                it_power_kw=it_kw,
                facility_power_kw=facility_kw,
                performance=run_input.rate,
                appue=appue,
                aopue=aopue,
                weight=weight,
            )
        )
    weighted_appue = None
    aggregated_aopue = None
    if rows:
        weighted_appue = aggregate_appue(
            [r.appue for r in rows],
            weights,
            units=[r.performance.reported()[1] for r in rows],
        )
        aggregated_aopue = weighted_appue / pue
    base_provenance: dict[str, object] = {
        "integration_method": "trapezoidal",
        "kb_convention": "1 KB = 1000 bytes",
        "appue_units": "performance rate per kW of average IT power",
    }
    if provenance:
        base_provenance.update(provenance)
    return MetricsReport(
        window=inputs.window,
        pue=pue,
        per_run=tuple(rows),
        weighted_appue=weighted_appue,
        aggregated_aopue=aggregated_aopue,
        provenance=base_provenance,
    )


def _check_run_devices(runs: Sequence[ApplicationRun], inventory: Inventory) -> None:
    it_ids = inventory.ids_in(DeviceCategory.IT_EQUIPMENT)
    for run in runs:
        for device_id in sorted(run.attributed_devices):
            if device_id not in inventory:
                raise UnknownDeviceError(
                    f"run {run.run_id!r} attributes unknown device {device_id!r}"
                )
            if device_id not in it_ids:
                raise ValidationError(
                    f"run {run.run_id!r} attributes non-IT device {device_id!r}"
                )
    for i, a in enumerate(runs):
        for b in runs[i + 1 :]:
            if a.start < b.end and b.start < a.end:
                shared = a.attributed_devices & b.attributed_devices
                if shared:
                    raise SharedDeviceConflictError(
                        f"runs {a.run_id!r} and {b.run_id!r} overlap in time and "
                        f"share device(s) {sorted(shared)!r}"
                    )


def analyze(
    traces: Sequence[PowerTrace],
    inventory: Inventory,
    runs: Sequence[ApplicationRun],
    window: tuple[float, float] | None = None,
    max_gap: float = DEFAULT_MAX_GAP,
) -> MetricsReport:
    """End-to-end computation: telemetry + runs -> metrics report.

    The report window defaults to the tightest interval covering all runs;
    with no runs an explicit window is required.  Per-run IT energy is the
    summed integral over the run's attributed devices within the run's own
    window.  Overlapping runs must not share devices.
    """
    _check_run_devices(runs, inventory)
    if window is None:
        if not runs:
            raise InvalidWindowError("no runs given; an explicit window is required")
        window = (min(r.start for r in runs), max(r.end for r in runs))
    start, end = window
    energy_window = category_energy(traces, inventory, start, end, max_gap)
    trace_by_device = {t.device_id: t for t in traces}
    run_inputs = []
    for run in runs:
        joules = []
        for device_id in sorted(run.attributed_devices):
            trace = trace_by_device.get(device_id)
            if trace is None:
                raise NoSamplesError(
                    f"run {run.run_id!r}: no telemetry for device {device_id!r}",
                    device_id=device_id,
                )
            joules.append(integrate_power(trace, run.start, run.end, max_gap))
        run_inputs.append(
            RunInput(
                run=run,
                it_energy_joules=math.fsum(joules),
                rate=compute_performance(run),
            )
        )
    inputs = MetricInputs(window=energy_window, runs=tuple(run_inputs))
    return build_report(
        inputs,
        provenance={
            "window": [start, end],
            "max_gap_seconds": max_gap,
            "trace_count": len(traces),
            "device_count": len(inventory),
        },
    )
