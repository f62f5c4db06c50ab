"""Laboratory for a parity-perturbed self-referential recursion.

The sequence under study follows Q(n) = Q(n - Q(n-1)) + Q(n - Q(n-2)) + eps(n)
with eps alternating between +1 (even n) and -1 (odd n), or switched off for
the classical variant.  The package computes traces at scale, measures the
structures the sequence exhibits (linear growth with persistent fluctuation,
dyadic self-similarity, a geometric law for value frequencies, seed-dependent
survival), and bundles the empirical claims into a verification checklist.
"""

from .checkpoint import load, save
from .diagnostics import (
    SERIES_CODES,
    Series,
    Subsequences,
    assert_all_odd,
    check_subsequence_identities,
    clock_indices,
    difference,
    fluctuation2,
    log_profile,
    renorm_residual,
    renorm_residual_split,
    safety_margin,
    selfsim_profile,
    series,
    series_domain,
    subsequences,
)
from .engine import (
    MAX_SEED_LEN,
    Outcome,
    OutcomeKind,
    Perturbation,
    RecursionConfig,
    Seed,
    Trace,
    extend,
    have_native_kernel,
    run,
)
from .errors import (
    CheckpointChecksumError,
    CheckpointError,
    CheckpointFormatError,
    CheckpointTruncatedError,
    ConfigError,
    CountOverflowError,
    ParityError,
    QseqError,
    RangeError,
    SaturationError,
    TraceStateError,
    ValueOverflowError,
)
from .frequency import (
    BlockReport,
    FrequencyTable,
    LawCheck,
    PeakInfo,
    average_check,
    block_report,
    build_frequency,
    check_dyadic_law,
    law_prediction,
    peak_scan,
)
from .seedlab import (
    SeedClass,
    SeedReport,
    TableReport,
    classify,
    detect_merge,
    detect_ramp_orbit,
    enumerate_seeds,
    table_report,
)
from .verify import Artifacts, CriterionResult, format_report, run_criteria

__version__ = "0.1.0"

__all__ = [
    "MAX_SEED_LEN",
    "SERIES_CODES",
    "Artifacts",
    "BlockReport",
    "CheckpointChecksumError",
    "CheckpointError",
    "CheckpointFormatError",
    "CheckpointTruncatedError",
    "ConfigError",
    "CountOverflowError",
    "CriterionResult",
    "FrequencyTable",
    "LawCheck",
    "Outcome",
    "OutcomeKind",
    "ParityError",
    "PeakInfo",
    "Perturbation",
    "QseqError",
    "RangeError",
    "RecursionConfig",
    "SaturationError",
    "Seed",
    "SeedClass",
    "SeedReport",
    "Series",
    "Subsequences",
    "TableReport",
    "Trace",
    "TraceStateError",
    "ValueOverflowError",
    "assert_all_odd",
    "average_check",
    "block_report",
    "build_frequency",
    "check_dyadic_law",
    "check_subsequence_identities",
    "classify",
    "clock_indices",
    "detect_merge",
    "detect_ramp_orbit",
    "difference",
    "enumerate_seeds",
    "extend",
    "fluctuation2",
    "format_report",
    "have_native_kernel",
    "law_prediction",
    "load",
    "log_profile",
    "peak_scan",
    "renorm_residual",
    "renorm_residual_split",
    "run",
    "run_criteria",
    "safety_margin",
    "save",
    "selfsim_profile",
    "series",
    "series_domain",
    "subsequences",
    "table_report",
]
