"""How often each odd value appears, organized into dyadic blocks.

Value v = 2m - 1 is binned at index m; block k holds m in
[2^k, 2^{k+1} - 1].  Counts live in 1-byte slots (observed counts at
desk scale stay below thirty) and abort loudly rather than wrap.  A
block is *complete* once every member value has appeared and none has
appeared after n_max/2: values cluster near n/2, so a half-horizon
quiet period means the block's counts are final.  Law and peak checks
refuse incomplete blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .engine import Trace
from .errors import (
    ConfigError,
    CountOverflowError,
    ParityError,
    RangeError,
    SaturationError,
)

try:
    from . import _qkernel
except ImportError:  # pragma: no cover
    _qkernel = None

_ST_OK = 0
_ST_PARITY = 3
_ST_COUNT_OVERFLOW = 4


@dataclass(frozen=True)
class FrequencyTable:
    """Counts and last occurrences of odd values over Q(1..n_max).

    Arrays are 1-based over m (slot 0 unused); values with m beyond
    m_cap are only tallied in overflow_count, keeping conservation:
    counts.sum() + overflow_count == n_max.
    """

    n_max: int
    m_cap: int
    counts: np.ndarray           # uint8
    last_occurrence: np.ndarray  # uint32, 0 = never seen
    overflow_count: int

    def count(self, m: int) -> int:
        self._check_m(m)
        return int(self.counts[m])

    def last(self, m: int) -> int:
        self._check_m(m)
        return int(self.last_occurrence[m])

    def _check_m(self, m: int) -> None:
        if not 1 <= m <= self.m_cap:
            raise RangeError(f"m={m} outside [1, {self.m_cap}]")


def _count_python(q: np.ndarray, n_max: int, counts: np.ndarray,
                  last: np.ndarray, m_cap: int):
    overflow = 0
    for n in range(1, n_max + 1):
        v = int(q[n])
        if v % 2 == 0:
            return _ST_PARITY, n
        m = (v + 1) // 2
        if m <= m_cap:
            if counts[m] == 255:
                return _ST_COUNT_OVERFLOW, m
            counts[m] += 1
            last[m] = n
        else:
            overflow += 1
    return _ST_OK, overflow


def build_frequency(trace: Trace, m_cap: int | None = None,
                    n_max: int | None = None) -> FrequencyTable:
    """Single pass over Q(1..n_max) (default: the whole trace)."""
    n_max = trace.len if n_max is None else n_max
    if not 1 <= n_max <= trace.len:
        raise RangeError(f"n_max={n_max} outside [1, {trace.len}]")
    if n_max >= 2**32:
        raise ConfigError("last-occurrence slots are 4-byte; n_max must stay below 2^32")
    m_cap = max(1, n_max // 2) if m_cap is None else m_cap
    if m_cap < 1:
        raise ConfigError(f"m_cap must be >= 1, got {m_cap}")

    counts = np.zeros(m_cap + 1, dtype=np.uint8)
    last = np.zeros(m_cap + 1, dtype=np.uint32)
    if _qkernel is not None:
        status, aux = _qkernel.count_values(trace.values, n_max, counts, last, m_cap)
    else:
        status, aux = _count_python(trace.values, n_max, counts, last, m_cap)

    if status == _ST_PARITY:
        raise ParityError(f"even value Q({aux})={trace.value_at(int(aux))}")
    if status == _ST_COUNT_OVERFLOW:
        raise CountOverflowError(f"count slot for m={aux} passed 255")
    counts.flags.writeable = False
    last.flags.writeable = False
    return FrequencyTable(n_max=n_max, m_cap=m_cap, counts=counts,
                          last_occurrence=last, overflow_count=int(aux))


@dataclass(frozen=True)
class BlockReport:
    """Summary of dyadic block k: m in [2^k, 2^{k+1} - 1]."""

    k: int
    n_max: int
    histogram: dict[int, int]  # observed count r -> number of m with that count
    total: int
    peak_m: int                # smallest m attaining the block maximum
    peak_count: int
    tie_count: int
    complete: bool

    @property
    def average(self) -> Fraction:
        return Fraction(self.total, 2**self.k)

    @property
    def peak_ratio(self) -> Fraction:
        return Fraction(self.peak_m, 2**self.k)


def block_report(table: FrequencyTable, k: int) -> BlockReport:
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    lo, hi = 2**k, 2 ** (k + 1) - 1
    if hi > table.m_cap:
        raise RangeError(f"block k={k} reaches m={hi}, beyond m_cap={table.m_cap}")
    block = table.counts[lo : hi + 1]
    last = table.last_occurrence[lo : hi + 1]

    values, reps = np.unique(block, return_counts=True)
    histogram = {int(v): int(c) for v, c in zip(values, reps)}
    peak_count = int(block.max())
    peak_offset = int(block.argmax())  # first occurrence, i.e. smallest m
    tie_count = int((block == peak_count).sum())
    complete = bool((block >= 1).all()) and int(last.max()) <= table.n_max // 2
    return BlockReport(
        k=k,
        n_max=table.n_max,
        histogram=histogram,
        total=int(block.sum(dtype=np.int64)),
        peak_m=lo + peak_offset,
        peak_count=peak_count,
        tie_count=tie_count,
        complete=complete,
    )


def law_prediction(k: int) -> dict[int, int]:
    """Predicted histogram for a complete block: count r appears
    2^{k-r+2} times for r = 3..k+1, and r = k+2, k+3 once each."""
    pred = {r: 2 ** (k - r + 2) for r in range(3, k + 2)}
    pred[k + 2] = pred.get(k + 2, 0) + 1
    pred[k + 3] = pred.get(k + 3, 0) + 1
    return pred


@dataclass(frozen=True)
class LawCheck:
    k: int
    passed: bool
    deviations: dict[int, tuple[int, int]]  # r -> (observed, predicted)


def check_dyadic_law(report: BlockReport) -> LawCheck:
    """Compare a complete block's histogram against the dyadic prediction."""
    if not report.complete:
        raise SaturationError(f"block k={report.k} is not complete at N={report.n_max}")
    predicted = law_prediction(report.k)
    deviations = {}
    for r in sorted(set(report.histogram) | set(predicted)):
        o = report.histogram.get(r, 0)
        p = predicted.get(r, 0)
        if o != p:
            deviations[r] = (o, p)
    return LawCheck(k=report.k, passed=not deviations, deviations=deviations)


def average_check(report: BlockReport) -> Fraction:
    """Deviation of the block average from 4 - 2^{-k} (0 when the law holds)."""
    if not report.complete:
        raise SaturationError(f"block k={report.k} is not complete at N={report.n_max}")
    return report.average - (4 - Fraction(1, 2**report.k))


@dataclass(frozen=True)
class PeakInfo:
    k: int
    peak_m: int
    peak_count: int
    tie_count: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.peak_m, 2**self.k)


def peak_scan(table: FrequencyTable, k_lo: int, k_hi: int) -> list[PeakInfo]:
    """Per-block argmax over k in [k_lo, k_hi]; blocks must be complete."""
    if k_lo > k_hi:
        raise ConfigError(f"empty k range [{k_lo}, {k_hi}]")
    out = []
    for k in range(k_lo, k_hi + 1):
        rep = block_report(table, k)
        if not rep.complete:
            raise SaturationError(f"block k={k} is not complete at N={table.n_max}")
        out.append(PeakInfo(k=k, peak_m=rep.peak_m, peak_count=rep.peak_count,
                            tie_count=rep.tie_count))
    return out
