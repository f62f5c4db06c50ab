"""Classify how the recursion behaves across small seeds.

Every seed lands in exactly one bucket:

  * ORIGINAL               matches the (1,1) reference from n = 1, shift 0
  * MERGES_INTO_ORIGINAL   matches the reference from some n0 > 1, shift 0
  * SHIFTED_ORIGINAL       matches reference(n + shift) for a nonzero shift
  * RAMP_ORBIT             locks onto Q(2m) = 2m, Q(2m+1) = 2
  * LONG_LIVED_IRREGULAR   survives the horizon, matches nothing above
  * STRONG_DEATH           dies at the earliest possible step
  * WEAK_DEATH             dies later

Merge claims are re-verified by a direct array comparison over the full
claimed span before they are reported.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .engine import OutcomeKind, Perturbation, RecursionConfig, Seed, Trace, run
from .errors import ConfigError, RangeError

DEFAULT_HORIZON = 10**6
DEFAULT_MAX_SHIFT = 8
DEFAULT_PROBE_WINDOW = 10**4
DEFAULT_ORBIT_SPAN = 10**5


class SeedClass(Enum):
    ORIGINAL = "original"
    MERGES_INTO_ORIGINAL = "merges_into_original"
    SHIFTED_ORIGINAL = "shifted_original"
    RAMP_ORBIT = "ramp_orbit"
    LONG_LIVED_IRREGULAR = "long_lived_irregular"
    WEAK_DEATH = "weak_death"
    STRONG_DEATH = "strong_death"


@dataclass(frozen=True)
class SeedReport:
    seed: Seed
    classification: SeedClass
    horizon: int
    death_step: int | None = None
    bad_indices: tuple[str, ...] = ()
    shift: int | None = None
    merge_index: int | None = None
    growth2: Fraction | None = None  # 2 Q(H) / H, present only for survivors

    def to_row(self) -> dict:
        return {
            "seed": list(self.seed.values),
            "class": self.classification.value,
            "horizon": self.horizon,
            "death_step": self.death_step,
            "bad_indices": list(self.bad_indices),
            "shift": self.shift,
            "merge_index": self.merge_index,
            "growth": None if self.growth2 is None else float(self.growth2) / 2,
        }


def enumerate_seeds(length: int, max_value: int) -> list[Seed]:
    """All seeds of the given length with entries 1..max_value, lexicographic."""
    if length not in (2, 3):
        raise ConfigError(f"seed survey covers lengths 2 and 3, got {length}")
    if max_value < 1:
        raise ConfigError(f"max_value must be >= 1, got {max_value}")
    return [Seed(vals) for vals in itertools.product(range(1, max_value + 1), repeat=length)]


def detect_ramp_orbit(trace: Trace, m_lo: int = 2, m_hi: int | None = None) -> bool:
    """True when Q(2m) = 2m and Q(2m+1) = 2 for every m in [m_lo, m_hi]."""
    if m_hi is None:
        m_hi = (trace.len - 1) // 2
    if m_lo < 1 or 2 * m_hi + 1 > trace.len:
        raise RangeError(f"orbit window [{m_lo}, {m_hi}] outside trace of length {trace.len}")
    if m_hi < m_lo:
        return False
    m = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    q = trace.values
    return bool((q[2 * m] == 2 * m).all() and (q[2 * m + 1] == 2).all())


def detect_merge(trace: Trace, reference: Trace,
                 max_shift: int = DEFAULT_MAX_SHIFT,
                 probe_window: int = DEFAULT_PROBE_WINDOW) -> tuple[int, int] | None:
    """Find (shift, n0) with trace(n) = reference(n + shift) for all n >= n0.

    Shifts are scanned in order 0, +1, -1, ..., +max_shift, -max_shift;
    the first shift whose trailing agreement span reaches probe_window
    wins, with n0 the smallest starting index.  Returns None when no
    shift qualifies.
    """
    if probe_window < 1 or max_shift < 0:
        raise ConfigError("need probe_window >= 1 and max_shift >= 0")
    tr = trace.values
    ref = reference.values
    len_tr, len_ref = trace.len, reference.len

    shifts = [0]
    for s in range(1, max_shift + 1):
        shifts.extend((s, -s))
    for s in shifts:
        n_start = max(1, 1 - s)
        n_end = min(len_tr, len_ref - s)
        if n_end - n_start + 1 < probe_window:
            continue
        a = tr[n_start : n_end + 1]
        b = ref[n_start + s : n_end + s + 1]
        if not np.array_equal(a[-probe_window:], b[-probe_window:]):
            continue
        mismatch = np.flatnonzero(a != b)
        n0 = n_start + (int(mismatch[-1]) + 1 if mismatch.size else 0)
        if n_end - n0 + 1 < probe_window:
            continue
        # re-verify the claim over its full span
        if np.array_equal(tr[n0 : n_end + 1], ref[n0 + s : n_end + s + 1]):
            return s, n0
    return None


def classify(seed: Seed, reference: Trace,
             horizon: int = DEFAULT_HORIZON,
             perturbation: Perturbation = Perturbation.ALTERNATING,
             max_shift: int = DEFAULT_MAX_SHIFT,
             probe_window: int = DEFAULT_PROBE_WINDOW,
             orbit_span: int = DEFAULT_ORBIT_SPAN,
             width: int = 4) -> SeedReport:
    """Run the seed to the horizon and classify the outcome."""
    if reference.seed.values != (1, 1) or reference.config.perturbation is not perturbation:
        raise ConfigError("reference must be the (1,1) trace with the same perturbation")
    if reference.len < horizon + max_shift:
        raise ConfigError(
            f"reference length {reference.len} < horizon + max_shift = {horizon + max_shift}"
        )
    trace = run(RecursionConfig(seed=seed, horizon=horizon,
                                perturbation=perturbation, width=width))
    out = trace.outcome
    if out.kind is OutcomeKind.STRONG_DEATH:
        return SeedReport(seed, SeedClass.STRONG_DEATH, horizon,
                          death_step=out.step, bad_indices=out.bad_indices)
    if out.kind is OutcomeKind.WEAK_DEATH:
        return SeedReport(seed, SeedClass.WEAK_DEATH, horizon,
                          death_step=out.step, bad_indices=out.bad_indices)

    growth2 = Fraction(2 * trace.value_at(horizon), horizon)
    m_hi = min(orbit_span, (trace.len - 1) // 2)
    if detect_ramp_orbit(trace, 2, m_hi):
        return SeedReport(seed, SeedClass.RAMP_ORBIT, horizon, growth2=growth2)
    merge = detect_merge(trace, reference, max_shift, probe_window)
    if merge is not None:
        shift, n0 = merge
        if shift == 0 and n0 == 1:
            cls = SeedClass.ORIGINAL
        elif shift == 0:
            cls = SeedClass.MERGES_INTO_ORIGINAL
        else:
            cls = SeedClass.SHIFTED_ORIGINAL
        return SeedReport(seed, cls, horizon, shift=shift, merge_index=n0, growth2=growth2)
    return SeedReport(seed, SeedClass.LONG_LIVED_IRREGULAR, horizon, growth2=growth2)


@dataclass(frozen=True)
class TableReport:
    """The 27-triple survey grouped the way the survivor table reads."""

    original: tuple[SeedReport, ...]
    merges: tuple[SeedReport, ...]
    shifted: tuple[SeedReport, ...]
    orbit: tuple[SeedReport, ...]
    irregular: tuple[SeedReport, ...]
    strong_deaths: tuple[SeedReport, ...]
    weak_deaths: tuple[SeedReport, ...]

    @property
    def survivors(self) -> tuple[SeedReport, ...]:
        return self.original + self.merges + self.shifted + self.orbit + self.irregular

    def to_dict(self) -> dict:
        return {
            "original": [r.to_row() for r in self.original],
            "merges_into_original": [r.to_row() for r in self.merges],
            "shifted_original": [r.to_row() for r in self.shifted],
            "ramp_orbit": [r.to_row() for r in self.orbit],
            "long_lived_irregular": [r.to_row() for r in self.irregular],
            "strong_deaths": [r.to_row() for r in self.strong_deaths],
            "weak_deaths": [r.to_row() for r in self.weak_deaths],
        }


def table_report(reports: list[SeedReport]) -> TableReport:
    """Group the full 27-triple survey; partial surveys are refused."""
    expected = {vals for vals in itertools.product((1, 2, 3), repeat=3)}
    got = {r.seed.values for r in reports}
    if got != expected:
        raise ConfigError("table_report needs exactly the 27 seeds of length 3, entries 1..3")
    if any(r.horizon < 10**5 for r in reports):
        raise ConfigError("table_report needs classification horizon >= 1e5")

    by_class: dict[SeedClass, list[SeedReport]] = {cls: [] for cls in SeedClass}
    for rep in sorted(reports, key=lambda r: r.seed.values):
        by_class[rep.classification].append(rep)
    return TableReport(
        original=tuple(by_class[SeedClass.ORIGINAL]),
        merges=tuple(by_class[SeedClass.MERGES_INTO_ORIGINAL]),
        shifted=tuple(by_class[SeedClass.SHIFTED_ORIGINAL]),
        orbit=tuple(by_class[SeedClass.RAMP_ORBIT]),
        irregular=tuple(by_class[SeedClass.LONG_LIVED_IRREGULAR]),
        strong_deaths=tuple(by_class[SeedClass.STRONG_DEATH]),
        weak_deaths=tuple(by_class[SeedClass.WEAK_DEATH]),
    )
