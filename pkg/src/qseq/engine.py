"""Core engine for the perturbed Q-recursion.

The sequence is Q(n) = Q(n - Q(n-1)) + Q(n - Q(n-2)) + eps(n) with
eps(n) = +1 at even n and -1 at odd n (or 0 in classical mode), started
from a short seed of positive values.  The engine runs the recursion
into a dense 1-based array, records how a run ends, and supports
resuming a live run at a larger horizon.

A run dies at step n when a feedback index n - Q(n-1) or n - Q(n-2)
is non-positive.  Deaths at the earliest possible step (no more than
one term computed past the seed, i.e. step <= seed_len + 2) are
classified strong: the seed itself is fatal.  Later deaths are weak.
Which of the two indices failed is recorded separately.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigError, RangeError, TraceStateError, ValueOverflowError

try:
    from . import _qkernel
except ImportError:  # pragma: no cover - compiled in normal installs
    _qkernel = None

MAX_SEED_LEN = 8

_WIDTH_DTYPES = {4: np.dtype("<u4"), 8: np.dtype("<u8")}
# arithmetic runs in signed 64-bit, so the 8-byte cap stays below 2**63
_WIDTH_CAPS = {4: 2**32 - 1, 8: 2**63 - 1}

_ST_OK = 0
_ST_DEATH = 1
_ST_OVERFLOW = 2


class Perturbation(Enum):
    ALTERNATING = "alternating"
    NONE = "none"

    @property
    def eps(self) -> tuple[int, int]:
        """(eps at even n, eps at odd n)."""
        return (1, -1) if self is Perturbation.ALTERNATING else (0, 0)


@dataclass(frozen=True)
class Seed:
    values: tuple[int, ...]
    max_len: int = MAX_SEED_LEN

    def __post_init__(self) -> None:
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        if not 2 <= len(vals) <= self.max_len:
            raise ConfigError(f"seed length must be in [2, {self.max_len}], got {len(vals)}")
        for v in vals:
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"seed entries must be integers >= 1, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "Seed":
        try:
            vals = tuple(int(part) for part in text.split(","))
        except ValueError as exc:
            raise ConfigError(f"cannot parse seed {text!r}") from exc
        return cls(vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.values)


@dataclass(frozen=True)
class RecursionConfig:
    seed: Seed
    horizon: int
    perturbation: Perturbation = Perturbation.ALTERNATING
    width: int = 4

    def __post_init__(self) -> None:
        if self.width not in _WIDTH_DTYPES:
            raise ConfigError(f"width must be 4 or 8 bytes, got {self.width}")
        if not isinstance(self.horizon, int) or self.horizon < len(self.seed):
            raise ConfigError(
                f"horizon must be an integer >= seed length {len(self.seed)}, got {self.horizon}"
            )
        cap = _WIDTH_CAPS[self.width]
        for v in self.seed:
            if v > cap:
                raise ConfigError(f"seed entry {v} exceeds the {self.width}-byte value range")

    @property
    def dtype(self) -> np.dtype:
        return _WIDTH_DTYPES[self.width]

    @property
    def cap(self) -> int:
        return _WIDTH_CAPS[self.width]


class OutcomeKind(Enum):
    ALIVE = "alive"
    WEAK_DEATH = "weak_death"
    STRONG_DEATH = "strong_death"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    step: int | None = None
    bad_t1: bool = False
    bad_t2: bool = False

    @classmethod
    def alive(cls) -> "Outcome":
        return cls(OutcomeKind.ALIVE)

    @classmethod
    def death(cls, step: int, seed_len: int, bad_t1: bool, bad_t2: bool) -> "Outcome":
        kind = OutcomeKind.STRONG_DEATH if step <= seed_len + 2 else OutcomeKind.WEAK_DEATH
        return cls(kind, step, bad_t1, bad_t2)

    @property
    def is_alive(self) -> bool:
        return self.kind is OutcomeKind.ALIVE

    @property
    def bad_indices(self) -> tuple[str, ...]:
        out = []
        if self.bad_t1:
            out.append("t1")
        if self.bad_t2:
            out.append("t2")
        return tuple(out)


class Trace:
    """An immutable computed run: config, values Q(1..len), and outcome.

    ``values`` is 1-based: slot 0 is unused and zero, slot n holds Q(n).
    """

    __slots__ = ("config", "_values", "outcome")

    def __init__(self, config: RecursionConfig, values: np.ndarray, outcome: Outcome):
        if values.dtype != config.dtype:
            values = values.astype(config.dtype)
        values = np.ascontiguousarray(values)
        values.flags.writeable = False
        self.config = config
        self._values = values
        self.outcome = outcome

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def len(self) -> int:
        return self._values.size - 1

    @property
    def seed(self) -> Seed:
        return self.config.seed

    def value_at(self, n: int) -> int:
        if not 1 <= n <= self.len:
            raise RangeError(f"n={n} outside computed range [1, {self.len}]")
        return int(self._values[n])

    def __len__(self) -> int:
        return self.len

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.config == other.config
            and self.outcome == other.outcome
            and np.array_equal(self._values, other._values)
        )

    def __hash__(self):
        return hash((self.config, self.outcome, self.len))

    def __repr__(self) -> str:
        state = self.outcome.kind.value
        if self.outcome.step is not None:
            state += f"@{self.outcome.step}"
        return f"Trace(seed=({self.seed}), {self.config.perturbation.value}, len={self.len}, {state})"


def _advance_python(q: np.ndarray, start: int, horizon: int,
                    eps_even: int, eps_odd: int, cap: int):
    """Pure-Python kernel, used only when the C extension is unavailable."""
    for n in range(start, horizon + 1):
        t1 = n - int(q[n - 1])
        t2 = n - int(q[n - 2])
        if t1 <= 0 or t2 <= 0:
            return _ST_DEATH, n, t1 <= 0, t2 <= 0
        val = int(q[t1]) + int(q[t2]) + (eps_even if n % 2 == 0 else eps_odd)
        if val > cap:
            return _ST_OVERFLOW, n, False, False
        q[n] = val
    return _ST_OK, 0, False, False


def have_native_kernel() -> bool:
    return _qkernel is not None


def _advance(q: np.ndarray, start: int, horizon: int,
             eps_even: int, eps_odd: int, cap: int):
    if _qkernel is not None:
        return _qkernel.advance(q, start, horizon, eps_even, eps_odd, cap)
    return _advance_python(q, start, horizon, eps_even, eps_odd, cap)


def _finish(config: RecursionConfig, arr: np.ndarray, status: int, step: int,
            bad1: bool, bad2: bool) -> Trace:
    if status == _ST_OK:
        return Trace(config, arr, Outcome.alive())
    if status == _ST_DEATH:
        outcome = Outcome.death(step, len(config.seed), bool(bad1), bool(bad2))
        return Trace(config, arr[:step].copy(), outcome)
    msg = f"value at step n={step} exceeds the {config.width}-byte range"
    if config.width == 4:
        msg += "; rerun with width=8"
    raise ValueOverflowError(msg)


def run(config: RecursionConfig) -> Trace:
    """Run the recursion from its seed up to config.horizon."""
    seed_len = len(config.seed)
    arr = np.zeros(config.horizon + 1, dtype=config.dtype)
    arr[1 : seed_len + 1] = tuple(config.seed)
    eps_even, eps_odd = config.perturbation.eps
    status, step, bad1, bad2 = _advance(
        arr, seed_len + 1, config.horizon, eps_even, eps_odd, config.cap
    )
    return _finish(config, arr, status, step, bad1, bad2)


def extend(trace: Trace, new_horizon: int) -> Trace:
    """Resume a live trace up to new_horizon.

    A target at or below the computed length returns the trace unchanged.
    The result is identical to a fresh run at new_horizon.
    """
    if not trace.outcome.is_alive:
        raise TraceStateError(
            f"cannot extend a dead trace ({trace.outcome.kind.value} at step {trace.outcome.step})"
        )
    if new_horizon <= trace.len:
        return trace
    config = replace(trace.config, horizon=new_horizon)
    arr = np.zeros(new_horizon + 1, dtype=config.dtype)
    arr[: trace.len + 1] = trace.values
    eps_even, eps_odd = config.perturbation.eps
    status, step, bad1, bad2 = _advance(
        arr, trace.len + 1, new_horizon, eps_even, eps_odd, config.cap
    )
    return _finish(config, arr, status, step, bad1, bad2)
