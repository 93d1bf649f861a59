"""Application performance as a data processing rate.

Each application category has one meaningful counter and rate unit:
data analysis reports KB/s (decimal, 1 KB = 1000 bytes), services report
requests/s, interactive workloads transactions/s, and HPC reports flop/s
(quoted as GFLOPS in reports).
"""

from __future__ import annotations

from .errors import CategoryMismatchError, InvalidWindowError
from .model import (
    RATE_UNIT_FOR_CATEGORY,
    WORK_KIND_FOR_CATEGORY,
    ApplicationRun,
    PerformanceRate,
    RateUnit,
    WorkKind,
)

__all__ = ["compute_performance", "PerformanceRate", "RateUnit"]


def compute_performance(run: ApplicationRun) -> PerformanceRate:
    """Rate of work over the run's window: counter / (end - start).

    Byte counters are converted to decimal kilobytes before division so that
    data-analysis rates come out in KB/s.
    """
    expected = WORK_KIND_FOR_CATEGORY[run.category]
    if run.work.kind is not expected:
        raise CategoryMismatchError(
            f"run {run.run_id!r}: {run.category.value} runs carry "
            f"{expected.value}, got {run.work.kind.value}"
        )
    duration = run.end - run.start
    if duration <= 0:
        raise InvalidWindowError(f"run {run.run_id!r}: zero-length window")
    amount = float(run.work.amount)
    if run.work.kind is WorkKind.BYTES_PROCESSED:
        amount /= 1000.0
    return PerformanceRate(value=amount / duration, unit=RATE_UNIT_FOR_CATEGORY[run.category])
