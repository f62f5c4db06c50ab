"""Property-based checks: engine vs oracle, invariants, and round trips."""

from decimal import Decimal, localcontext

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import oracle
from qseq import checkpoint
from qseq.cli import half_str
from qseq.diagnostics import SERIES_CODES, series, series_domain
from qseq.engine import (
    Outcome,
    OutcomeKind,
    Perturbation,
    RecursionConfig,
    Seed,
    extend,
    run,
)
from qseq.errors import TraceStateError, ValueOverflowError
from qseq.frequency import build_frequency

seed_values = st.lists(st.integers(min_value=1, max_value=6), min_size=2, max_size=4)
odd_seed_values = st.lists(
    st.integers(min_value=0, max_value=4).map(lambda k: 2 * k + 1),
    min_size=2,
    max_size=4,
)


def run_wide(vals, horizon, perturbation=Perturbation.ALTERNATING):
    """Run with 8-byte slots; discard the example if it still overflows."""
    config = RecursionConfig(seed=Seed(tuple(vals)), horizon=horizon,
                             perturbation=perturbation, width=8)
    try:
        return run(config)
    except ValueOverflowError:
        assume(False)


@settings(deadline=None, max_examples=60)
@given(vals=seed_values, horizon=st.integers(min_value=8, max_value=400),
       alternating=st.booleans())
def test_engine_matches_oracle(vals, horizon, alternating):
    perturbation = Perturbation.ALTERNATING if alternating else Perturbation.NONE
    trace = run_wide(vals, horizon, perturbation)
    q, death = oracle.naive_run(vals, horizon, alternating)
    assert [int(v) for v in trace.values[1:]] == q[1:]
    if death is None:
        assert trace.outcome.is_alive
    else:
        step, t1_bad, t2_bad = death
        assert trace.outcome.step == step
        assert trace.outcome.bad_t1 == t1_bad
        assert trace.outcome.bad_t2 == t2_bad
        expected = (OutcomeKind.STRONG_DEATH if step <= len(vals) + 2
                    else OutcomeKind.WEAK_DEATH)
        assert trace.outcome.kind is expected


@settings(deadline=None, max_examples=60)
@given(vals=odd_seed_values, horizon=st.integers(min_value=8, max_value=400))
def test_odd_seeds_keep_every_value_odd(vals, horizon):
    # odd + odd +/- 1 is odd again, so parity is preserved forever
    trace = run_wide(vals, horizon)
    assert (trace.values[1:] % 2 == 1).all()


@settings(deadline=None, max_examples=60)
@given(vals=seed_values, h1=st.integers(min_value=8, max_value=150),
       extra=st.integers(min_value=0, max_value=150))
def test_extend_equals_fresh_run(vals, h1, extra):
    first = run_wide(vals, h1)
    h2 = h1 + extra
    if not first.outcome.is_alive:
        with pytest.raises(TraceStateError):
            extend(first, h2)
        return
    try:
        longer = extend(first, h2)
    except ValueOverflowError:
        assume(False)
    assert longer == run_wide(vals, h2)


@settings(deadline=None, max_examples=40)
@given(vals=seed_values, horizon=st.integers(min_value=8, max_value=200),
       width=st.sampled_from([4, 8]), alternating=st.booleans())
def test_checkpoint_round_trip(tmp_path_factory, vals, horizon, width, alternating):
    perturbation = Perturbation.ALTERNATING if alternating else Perturbation.NONE
    config = RecursionConfig(seed=Seed(tuple(vals)), horizon=horizon,
                             perturbation=perturbation, width=width)
    try:
        trace = run(config)
    except ValueOverflowError:
        assume(False)
    path = tmp_path_factory.mktemp("ckpt") / "trace.qtr"
    checkpoint.save(trace, path)
    first_bytes = path.read_bytes()
    assert checkpoint.load(path) == trace
    checkpoint.save(trace, path)
    assert path.read_bytes() == first_bytes


@given(doubled=st.integers(min_value=-(10**30), max_value=10**30))
def test_half_str_is_exact(doubled):
    with localcontext() as ctx:
        ctx.prec = 60
        expected = f"{Decimal(doubled) / 2:.1f}"
    assert half_str(doubled) == expected


@given(vals=seed_values)
def test_seed_text_round_trip(vals):
    seed = Seed(tuple(vals))
    assert Seed.parse(str(seed)) == seed


@settings(deadline=None, max_examples=40)
@given(code=st.sampled_from([c for c in SERIES_CODES if c != "G"]),
       data=st.data())
def test_series_windows_are_slices_of_the_full_series(short_trace, code, data):
    d_lo, d_hi = series_domain(short_trace, code)
    lo = data.draw(st.integers(min_value=d_lo, max_value=d_hi))
    hi = data.draw(st.integers(min_value=lo, max_value=d_hi))
    full = series(short_trace, code)
    window = series(short_trace, code, lo, hi)
    assert window.halves == full.halves
    assert np.array_equal(window.x, np.arange(lo, hi + 1))
    assert np.array_equal(window.y, full.y[lo - d_lo : hi - d_lo + 1])


@settings(deadline=None, max_examples=40)
@given(vals=odd_seed_values,
       horizon=st.integers(min_value=8, max_value=255),
       m_cap=st.integers(min_value=1, max_value=300))
def test_frequency_conservation(vals, horizon, m_cap):
    trace = run_wide(vals, horizon)
    table = build_frequency(trace, m_cap=m_cap)
    counted = int(table.counts.sum(dtype=np.int64))
    assert counted + table.overflow_count == trace.len
    seen = table.counts[1:] > 0
    assert np.array_equal(seen, table.last_occurrence[1:] > 0)
    assert int(table.last_occurrence.max(initial=0)) <= trace.len

    values = trace.values[1 : trace.len + 1].astype(np.int64)
    m = (values + 1) // 2
    probe = int(np.clip(m[0], 1, m_cap))
    assert table.count(probe) == int((m == probe).sum())
