"""Benchmark the trapezoidal window kernel: numba @njit vs pure numpy.

Builds one large piecewise-linear trace, integrates a batch of random
windows with both implementations, checks they agree, and prints the
per-window timing.  Run as: python benchmarks/bench_integration.py
"""

from __future__ import annotations

import time

import numpy as np

from axpue._kernels import HAS_NUMBA, _window_energy_numpy

N_SAMPLES = 2_000_000
N_WINDOWS = 200
N_TRIALS = 5


def build_trace(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    dts = rng.uniform(0.5, 2.0, size=N_SAMPLES - 1)
    times = np.concatenate(([0.0], np.cumsum(dts)))
    watts = rng.uniform(50.0, 500.0, size=N_SAMPLES)
    return times, watts


def build_windows(rng: np.random.Generator, t_end: float) -> list[tuple[float, float]]:
    lows = rng.uniform(0.0, 0.4 * t_end, size=N_WINDOWS)
    highs = rng.uniform(0.6 * t_end, t_end, size=N_WINDOWS)
    return list(zip(lows, highs))


def time_kernel(kernel, times, watts, windows) -> tuple[float, float]:
    best = float("inf")
    checksum = 0.0
    for _ in range(N_TRIALS):
        tic = time.perf_counter()
        checksum = 0.0
        for start, end in windows:
            energy, code, _, _ = kernel(times, watts, start, end, 1e9)
            checksum += energy
        best = min(best, time.perf_counter() - tic)
    return best, checksum


def main() -> None:
    rng = np.random.default_rng(42)
    times, watts = build_trace(rng)
    windows = build_windows(rng, float(times[-1]))
    print(f"trace: {N_SAMPLES:,} samples; {N_WINDOWS} windows; best of {N_TRIALS}")

    numpy_s, numpy_sum = time_kernel(_window_energy_numpy, times, watts, windows)
    print(f"numpy fallback   {numpy_s * 1e3 / N_WINDOWS:8.3f} ms/window")

    if not HAS_NUMBA:
        print("numba unavailable; fallback only")
        return
    from axpue._kernels import _window_energy_numba

    _window_energy_numba(times[:10], watts[:10], 0.0, 5.0, 1e9)  # compile
    numba_s, numba_sum = time_kernel(_window_energy_numba, times, watts, windows)
    print(f"numba @njit      {numba_s * 1e3 / N_WINDOWS:8.3f} ms/window")
    print(f"speedup          {numpy_s / numba_s:8.2f}x")
    rel = abs(numpy_sum - numba_sum) / abs(numpy_sum)
    print(f"agreement        {rel:.2e} relative")
    assert rel < 1e-9


if __name__ == "__main__":
    main()
