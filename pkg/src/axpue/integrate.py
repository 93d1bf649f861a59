"""Energy integration over timestamped power traces.

Power between samples is treated as piecewise-linear (trapezoidal rule),
which is exact for the simulator's piecewise-linear device models.  A window
edge may lie beyond the first or last sample by at most ``max_gap`` seconds,
in which case the nearest sample's value is extended as a constant; any
larger uncovered stretch is a data-quality error, never silently bridged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CoverageGapError,
    DuplicateDeviceError,
    DuplicateSampleError,
    InvalidPowerError,
    InvalidWindowError,
    NoSamplesError,
    UnknownDeviceError,
    ValidationError,
)
from .model import DeviceCategory, EnergyWindow, Inventory, PowerSample

#: Default largest tolerated spacing between samples, in seconds.
DEFAULT_MAX_GAP = 60.0


@dataclass(frozen=True)
class PowerTrace:
    """Time-ordered power samples of a single device.

    Arrays are copied and frozen at construction; timestamps must be strictly
    increasing and all power values non-negative.
    """

    device_id: str
    times: np.ndarray
    watts: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=np.float64, copy=True)
        watts = np.array(self.watts, dtype=np.float64, copy=True)
        if times.ndim != 1 or watts.ndim != 1 or times.size != watts.size:
            raise ValidationError("times and watts must be 1-d arrays of equal length")
        if not np.all(np.isfinite(times)):
            raise ValidationError(f"trace {self.device_id!r}: non-finite timestamp")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError(
                f"trace {self.device_id!r}: timestamps must be strictly increasing"
            )
        if not np.all(np.isfinite(watts)) or (watts.size and float(watts.min()) < 0):
            raise InvalidPowerError(
                f"trace {self.device_id!r}: power values must be finite and >= 0"
            )
        times.setflags(write=False)
        watts.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "watts", watts)

    def __len__(self) -> int:
        return int(self.times.size)

    @classmethod
    def from_samples(cls, samples: Iterable[PowerSample]) -> "PowerTrace":
        """Build a trace from samples of one device, sorting by timestamp."""
        samples = sorted(samples, key=lambda s: s.timestamp)
        if not samples:
            raise NoSamplesError("cannot build a trace from zero samples")
        device_id = samples[0].device_id
        for s in samples:
            if s.device_id != device_id:
                raise ValidationError(
                    f"mixed device ids in one trace: {device_id!r} and {s.device_id!r}"
                )
        times = [s.timestamp for s in samples]
        for a, b in zip(times, times[1:]):
            if a == b:
                raise DuplicateSampleError(
                    f"device {device_id!r}: duplicate timestamp {a!r}"
                )
        return cls(device_id, np.array(times), np.array([s.power for s in samples]))


def _check_window(start: float, end: float) -> None:
    if not (math.isfinite(start) and math.isfinite(end)) or end <= start:
        raise InvalidWindowError(f"window end ({end}) must be > start ({start})")


def integrate_power(
    trace: PowerTrace, start: float, end: float, max_gap: float = DEFAULT_MAX_GAP
) -> float:
    """Trapezoidal integral of a trace's power over [start, end], in joules.

    Boundary values come from linear interpolation between the bracketing
    samples, or from constant extension when the window edge lies beyond the
    first/last sample by at most ``max_gap``.

    Raises :class:`NoSamplesError` on an empty trace,
    :class:`InvalidWindowError` when ``end <= start``, and
    :class:`CoverageGapError` when any stretch relevant to the window is
    wider than ``max_gap``.
    """
    _check_window(start, end)
    if len(trace) == 0:
        raise NoSamplesError(
            f"device {trace.device_id!r}: trace holds no samples",
            device_id=trace.device_id,
        )
    energy, code, lo, hi = _kernels.window_energy(
        trace.times, trace.watts, float(start), float(end), float(max_gap)
    )
    if code == _kernels.COVERAGE_GAP:
        raise CoverageGapError(
            f"device {trace.device_id!r}: no samples across [{lo}, {hi}] "
            f"({hi - lo:.3f} s > max_gap {max_gap} s)",
            gap=(lo, hi),
            device_id=trace.device_id,
        )
    return energy


def check_coverage(
    trace: PowerTrace, start: float, end: float, max_gap: float = DEFAULT_MAX_GAP
) -> None:
    """Raise the error :func:`integrate_power` would raise, without the result."""
    integrate_power(trace, start, end, max_gap)


def average_power(energy: float, start: float, end: float) -> float:
    """Average power in watts of ``energy`` joules spread over [start, end]."""
    _check_window(start, end)
    if energy < 0 or not math.isfinite(energy):
        raise ValidationError(f"energy must be finite and >= 0 J, got {energy!r}")
    return energy / (end - start)


def category_energy(
    traces: Sequence[PowerTrace],
    inventory: Inventory,
    start: float,
    end: float,
    max_gap: float = DEFAULT_MAX_GAP,
) -> EnergyWindow:
    """Integrate every trace over [start, end] and sum by facility category.

    Every trace's device must exist in the inventory; integration errors
    propagate carrying the offending device_id.
    """
    _check_window(start, end)
    seen: set[str] = set()
    for trace in traces:
        if trace.device_id not in inventory:
            raise UnknownDeviceError(f"device {trace.device_id!r} not in inventory")
        if trace.device_id in seen:
            raise DuplicateDeviceError(
                f"multiple traces for device {trace.device_id!r}"
            )
        seen.add(trace.device_id)
    energies: dict[DeviceCategory, list[float]] = {cat: [] for cat in DeviceCategory}
    for trace in sorted(traces, key=lambda t: t.device_id):
        joules = integrate_power(trace, start, end, max_gap)
        energies[inventory.category_of(trace.device_id)].append(joules)
    return EnergyWindow(
        start=start,
        end=end,
        energy_by_category={cat: math.fsum(parts) for cat, parts in energies.items()},
    )
