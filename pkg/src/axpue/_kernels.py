"""Window-integration kernels for power traces.

The hot loop (trapezoidal integration of one trace over one window, with gap
detection and boundary handling) exists twice: a numba ``@njit`` version and
a pure-numpy fallback.  The numpy path is selected when numba is missing or
when ``AXPUE_DISABLE_NUMBA`` is set to a non-empty value other than ``0``.

Both kernels share one contract::

    (energy, code, gap_lo, gap_hi) = kernel(times, watts, start, end, max_gap)

``code`` is ``COVERAGE_OK`` or ``COVERAGE_GAP``; on a gap, ``energy`` is
meaningless and ``(gap_lo, gap_hi)`` brackets the uncovered stretch.
Semantics: linear interpolation between bracketing samples, constant
extension beyond the first/last sample, and a gap whenever two adjacent
samples relevant to the window are more than ``max_gap`` apart.
"""

from __future__ import annotations

import os

import numpy as np

COVERAGE_OK = 0
COVERAGE_GAP = 1


def _flag_disabled() -> bool:
    value = os.environ.get("AXPUE_DISABLE_NUMBA", "")
    return value not in ("", "0")


def _window_energy_numpy(
    times: np.ndarray, watts: np.ndarray, start: float, end: float, max_gap: float
) -> tuple[float, int, float, float]:
    if times[0] - start > max_gap:
        return 0.0, COVERAGE_GAP, start, float(times[0])
    if end - times[-1] > max_gap:
        return 0.0, COVERAGE_GAP, float(times[-1]), end
    if times.size > 1:
        gaps = np.diff(times)
        bad = (gaps > max_gap) & (times[:-1] < end) & (times[1:] > start)
        hits = np.nonzero(bad)[0]
        if hits.size:
            i = int(hits[0])
            return 0.0, COVERAGE_GAP, float(times[i]), float(times[i + 1])
    p_start = float(np.interp(start, times, watts))
    p_end = float(np.interp(end, times, watts))
    i0 = int(np.searchsorted(times, start, side="right"))
    i1 = int(np.searchsorted(times, end, side="left"))
    ts = np.concatenate(([start], times[i0:i1], [end]))
    ps = np.concatenate(([p_start], watts[i0:i1], [p_end]))
    energy = 0.5 * float(np.sum((ps[1:] + ps[:-1]) * np.diff(ts)))
    return energy, COVERAGE_OK, 0.0, 0.0


try:
    from numba import njit

    HAS_NUMBA = True

    @njit(cache=True)
    def _window_energy_numba(times, watts, start, end, max_gap):
        n = times.shape[0]
        if times[0] - start > max_gap:
            return 0.0, COVERAGE_GAP, start, times[0]
        if end - times[n - 1] > max_gap:
            return 0.0, COVERAGE_GAP, times[n - 1], end
        for i in range(n - 1):
            if times[i + 1] - times[i] > max_gap:
                if times[i] < end and times[i + 1] > start:
                    return 0.0, COVERAGE_GAP, times[i], times[i + 1]

        p_start = _interp_scalar(times, watts, start)
        p_end = _interp_scalar(times, watts, end)

        # First sample strictly inside the window.
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if times[mid] <= start:
                lo = mid + 1
            else:
                hi = mid

        energy = 0.0
        t_prev = start
        p_prev = p_start
        i = lo
        while i < n and times[i] < end:
            energy += 0.5 * (p_prev + watts[i]) * (times[i] - t_prev)
            t_prev = times[i]
            p_prev = watts[i]
            i += 1
        energy += 0.5 * (p_prev + p_end) * (end - t_prev)
        return energy, COVERAGE_OK, 0.0, 0.0

    @njit(cache=True)
    def _interp_scalar(times, watts, t):
        n = times.shape[0]
        if t <= times[0]:
            return watts[0]
        if t >= times[n - 1]:
            return watts[n - 1]
        lo = 0
        hi = n - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if times[mid] <= t:
                lo = mid
            else:
                hi = mid
        frac = (t - times[lo]) / (times[hi] - times[lo])
        return watts[lo] + frac * (watts[hi] - watts[lo])

except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False
    _window_energy_numba = None

NUMBA_ENABLED = HAS_NUMBA and not _flag_disabled()


def window_energy(
    times: np.ndarray, watts: np.ndarray, start: float, end: float, max_gap: float
) -> tuple[float, int, float, float]:
    """Dispatch to the jitted kernel or the numpy fallback."""
    if NUMBA_ENABLED:
        energy, code, lo, hi = _window_energy_numba(times, watts, start, end, max_gap)
        return float(energy), int(code), float(lo), float(hi)
    return _window_energy_numpy(times, watts, start, end, max_gap)
