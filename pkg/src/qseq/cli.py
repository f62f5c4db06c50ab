"""Command-line surface for the recursion laboratory.

Verbs:

  compute   run the recursion, write a trace checkpoint, optionally export values
  diagnose  export one named diagnostic series as a two-column data file
  selfsim   export dyadic-decimated fluctuation profiles, one file per level
  freq      frequency analysis: structured block report plus an F(m) data file
  seeds     classify seeds and render the survey table
  verify    run the thirteen reproducibility checks

Exit codes: 0 success, 1 verification failure, 2 invalid configuration or
analysis precondition, 3 the run died before the requested horizon,
4 value overflow, 5 I/O or checkpoint-format failure.

Data files are whitespace-separated two-column plain text: integers bare,
half-integer series with exactly one decimal digit, normalized positions
with eight.  Identical flags produce byte-identical files; files are
written atomically (temp file + rename).  Default filenames land in the
directory named by --data-dir, or the QSEQ_DATA_DIR environment variable,
or ./qseq-data; explicit paths are used as given.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import checkpoint
from .diagnostics import SERIES_CODES, series, series_domain
from .engine import (
    OutcomeKind,
    Perturbation,
    RecursionConfig,
    Seed,
    extend,
    run,
)
from .errors import (
    CheckpointError,
    ConfigError,
    QseqError,
    RangeError,
    ValueOverflowError,
)
from .frequency import (
    BlockReport,
    block_report,
    build_frequency,
    check_dyadic_law,
    law_prediction,
)
from .seedlab import (
    DEFAULT_MAX_SHIFT,
    SeedReport,
    classify,
    enumerate_seeds,
)
from .verify import Artifacts, format_report, run_criteria

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEATH = 3
EXIT_OVERFLOW = 4
EXIT_IO = 5


# ------------------------------------------------------------- formatting

def half_str(doubled: int) -> str:
    """Exact decimal for a half-integer stored doubled: 3 -> '1.5', -1 -> '-0.5'."""
    sign = "-" if doubled < 0 else ""
    magnitude = abs(int(doubled))
    return f"{sign}{magnitude // 2}.{'5' if magnitude % 2 else '0'}"


def format_series_lines(ser) -> list[str]:
    lines = []
    x_is_int = ser.x.dtype.kind in "iu"
    for x, y in zip(ser.x, ser.y):
        x_txt = str(int(x)) if x_is_int else f"{float(x):.8f}"
        y_txt = half_str(int(y)) if ser.halves else str(int(y))
        lines.append(f"{x_txt} {y_txt}")
    return lines


def write_text(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write("\n".join(lines))
            if lines:
                handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------- plumbing

def data_dir(args) -> Path:
    if args.data_dir is not None:
        return Path(args.data_dir)
    env = os.environ.get("QSEQ_DATA_DIR")
    return Path(env) if env else Path("qseq-data")


def resolve(args, explicit: str | None, default_name: str) -> Path:
    return Path(explicit) if explicit is not None else data_dir(args) / default_name


def config_from(args) -> RecursionConfig:
    return RecursionConfig(
        seed=Seed.parse(args.seed),
        horizon=args.horizon,
        perturbation=Perturbation(args.perturbation),
        width=args.width,
    )


def trace_tag(config: RecursionConfig) -> str:
    seed_part = str(config.seed).replace(",", "-")
    return f"s{seed_part}_{config.perturbation.value}_w{config.width}"


def obtain_trace(config: RecursionConfig, trace_path: Path | None, save: bool):
    """Load a matching checkpoint, extend it, or run fresh; optionally save."""
    trace = None
    if trace_path is not None and trace_path.exists():
        try:
            stored = checkpoint.load(trace_path)
        except CheckpointError as exc:
            print(f"note: ignoring unreadable checkpoint {trace_path}: {exc}",
                  file=sys.stderr)
            stored = None
        if stored is not None and (
            stored.config.seed == config.seed
            and stored.config.perturbation is config.perturbation
            and stored.config.width == config.width
        ):
            if stored.config.horizon == config.horizon:
                return stored, False
            if stored.outcome.is_alive and stored.config.horizon < config.horizon:
                trace = extend(stored, config.horizon)
    if trace is None:
        trace = run(config)
    if save and trace_path is not None:
        checkpoint.save(trace, trace_path)
    return trace, True


def report_death(trace) -> None:
    out = trace.outcome
    kind = "strong" if out.kind is OutcomeKind.STRONG_DEATH else "weak"
    bad = ",".join(out.bad_indices)
    print(
        f"{kind} death at step {out.step} (non-positive feedback index: {bad}); "
        f"{trace.len} of {trace.config.horizon} values computed",
        file=sys.stderr,
    )


# ------------------------------------------------------------- handlers

def cmd_compute(args) -> int:
    config = config_from(args)
    trace_path = resolve(args, args.trace, f"trace_{trace_tag(config)}.qtr")
    trace, fresh = obtain_trace(config, trace_path, save=True)
    if not fresh:
        print(f"reusing checkpoint {trace_path}")
    else:
        print(f"wrote checkpoint {trace_path} ({trace.len} values)")
    if args.export is not None:
        export_path = resolve(
            args, args.export or None,
            f"values_{trace_tag(config)}_n{config.horizon}.dat",
        )
        q = trace.values
        write_text(export_path, [f"{n} {int(q[n])}" for n in range(1, trace.len + 1)])
        print(f"wrote {export_path} ({trace.len} lines)")
    if not trace.outcome.is_alive:
        report_death(trace)
        return EXIT_DEATH
    return EXIT_OK


def cmd_diagnose(args) -> int:
    config = config_from(args)
    trace_path = Path(args.trace) if args.trace else None
    trace, _ = obtain_trace(config, trace_path, save=trace_path is not None)
    if not trace.outcome.is_alive:
        report_death(trace)
        return EXIT_DEATH
    ser = series(trace, args.series, args.lo, args.hi,
                 samples_per_octave=args.samples_per_octave)
    out_path = resolve(
        args, args.out,
        f"series_{args.series}_{trace_tag(config)}_n{config.horizon}.dat",
    )
    write_text(out_path, format_series_lines(ser))
    print(f"wrote {out_path} ({len(ser)} lines)")
    return EXIT_OK


def parse_levels(text: str, label: str = "level") -> list[int]:
    levels = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo_txt, hi_txt = part.split("..", 1)
                lo, hi = int(lo_txt), int(hi_txt)
                if hi < lo:
                    raise ConfigError(f"bad {label} range {part!r}")
                levels.extend(range(lo, hi + 1))
            elif part:
                levels.append(int(part))
        except ValueError as exc:
            raise ConfigError(f"bad {label} list entry {part!r}") from exc
    if not levels:
        raise ConfigError(f"no {label} numbers in {text!r}")
    return sorted(set(levels))


def cmd_selfsim(args) -> int:
    from .diagnostics import selfsim_profile

    config = config_from(args)
    levels = parse_levels(args.levels)
    if 2 ** max(levels) > config.horizon:
        raise RangeError(
            f"level {max(levels)} needs horizon >= {2 ** max(levels)}, have {config.horizon}"
        )
    trace_path = Path(args.trace) if args.trace else None
    trace, _ = obtain_trace(config, trace_path, save=trace_path is not None)
    if not trace.outcome.is_alive:
        report_death(trace)
        return EXIT_DEATH
    for k in levels:
        ser = selfsim_profile(trace, k)
        if args.out_dir is not None:
            out_path = Path(args.out_dir) / f"selfsim_k{k}.dat"
        else:
            out_path = resolve(
                args, None, f"selfsim_k{k}_{trace_tag(config)}_n{config.horizon}.dat"
            )
        write_text(out_path, format_series_lines(ser))
        print(f"wrote {out_path} ({len(ser)} lines)")
    return EXIT_OK


def block_lines(report: BlockReport) -> list[str]:
    lo, hi = 2**report.k, 2 ** (report.k + 1) - 1
    if report.complete:
        verdict = "pass" if check_dyadic_law(report).passed else "fail"
    else:
        verdict = "unchecked"
    head = (
        f"block k={report.k} range {lo}..{hi} total {report.total}"
        f" average {float(report.average):.6f}"
        f" complete {'yes' if report.complete else 'no'} law {verdict}"
        f" peak_m {report.peak_m} peak_count {report.peak_count}"
        f" ties {report.tie_count} peak_ratio {float(report.peak_ratio):.6f}"
    )
    hist = " ".join(f"{r}:{c}" for r, c in sorted(report.histogram.items()))
    pred = " ".join(f"{r}:{c}" for r, c in sorted(law_prediction(report.k).items()))
    return [head, f"hist k={report.k} {hist}", f"law_prediction k={report.k} {pred}"]


def cmd_freq(args) -> int:
    config = config_from(args)
    trace_path = Path(args.trace) if args.trace else None
    trace, _ = obtain_trace(config, trace_path, save=trace_path is not None)
    if not trace.outcome.is_alive:
        report_death(trace)
        return EXIT_DEATH
    table = build_frequency(trace, m_cap=args.m_cap)
    k_max = args.kmax
    if 2 ** (k_max + 1) - 1 > table.m_cap:
        raise RangeError(
            f"kmax {k_max} needs m_cap >= {2 ** (k_max + 1) - 1}, have {table.m_cap}"
        )

    lines = [
        "# frequency report",
        f"n_max {table.n_max}",
        f"m_cap {table.m_cap}",
        f"overflow {table.overflow_count}",
    ]
    for k in range(0, k_max + 1):
        lines.extend(block_lines(block_report(table, k)))
    report_path = resolve(args, args.out, f"freq_report_{trace_tag(config)}"
                                          f"_n{config.horizon}.txt")
    write_text(report_path, lines)
    print(f"wrote {report_path}")

    m_hi = 2 ** (k_max + 1) - 1
    data_path = resolve(args, args.data_out, f"freq_F_{trace_tag(config)}"
                                             f"_n{config.horizon}_k{k_max}.dat")
    counts = table.counts
    write_text(data_path, [f"{m} {int(counts[m])}" for m in range(1, m_hi + 1)])
    print(f"wrote {data_path} ({m_hi} lines)")
    return EXIT_OK


def seed_row(report: SeedReport) -> str:
    row = report.to_row()
    growth = "-" if row["growth"] is None else f"{row['growth']:.6f}"
    death = "-" if row["death_step"] is None else str(row["death_step"])
    bad = ",".join(row["bad_indices"]) or "-"
    shift = "-" if row["shift"] is None else str(row["shift"])
    merge = "-" if row["merge_index"] is None else str(row["merge_index"])
    seed_txt = ",".join(str(v) for v in row["seed"])
    return (
        f"seed {seed_txt} class {row['class']} death {death} bad {bad}"
        f" shift {shift} merge_n {merge} growth {growth}"
    )


def cmd_seeds(args) -> int:
    reference = run(RecursionConfig(
        seed=Seed((1, 1)),
        horizon=args.horizon + DEFAULT_MAX_SHIFT,
        perturbation=Perturbation(args.perturbation),
    ))
    rows = []
    for seed in enumerate_seeds(args.length, args.max_value):
        report = classify(seed, reference, horizon=args.horizon,
                          perturbation=Perturbation(args.perturbation))
        rows.append(seed_row(report))
    header = (f"# seed survey length {args.length} entries 1..{args.max_value}"
              f" horizon {args.horizon}")
    for line in rows:
        print(line)
    if args.out is not None or not args.no_file:
        out_path = resolve(
            args, args.out,
            f"seeds_len{args.length}_max{args.max_value}_h{args.horizon}.txt",
        )
        write_text(out_path, [header] + rows)
        print(f"wrote {out_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    numbers = set(parse_levels(args.only, label="criterion")) if args.only else None
    artifacts = Artifacts()
    results = run_criteria(artifacts, numbers)
    print(format_report(results))
    return EXIT_OK if all(res.passed for res in results) else EXIT_VERIFY_FAILED


# ------------------------------------------------------------- the parser

def add_trace_flags(sub, default_horizon: int) -> None:
    sub.add_argument("--seed", default="1,1", help="comma-separated start values")
    sub.add_argument("--horizon", type=int, default=default_horizon,
                     help="number of terms to compute")
    sub.add_argument("--perturbation", choices=[p.value for p in Perturbation],
                     default=Perturbation.ALTERNATING.value)
    sub.add_argument("--width", type=int, choices=(4, 8), default=4,
                     help="bytes per stored value")
    sub.add_argument("--trace", help="checkpoint path to reuse / maintain")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qseq",
        description="Laboratory for the parity-perturbed self-referential recursion.",
    )
    parser.add_argument("--data-dir", help="directory for default output files "
                                           "(overrides QSEQ_DATA_DIR)")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("compute", help="run the recursion and checkpoint it")
    add_trace_flags(sub, default_horizon=10**6)
    sub.add_argument("--export", nargs="?", const="", default=None,
                     help="also write two-column values (optional path)")
    sub.set_defaults(func=cmd_compute)

    sub = commands.add_parser("diagnose", help="export a diagnostic series")
    add_trace_flags(sub, default_horizon=10**6)
    sub.add_argument("--series", required=True, choices=list(SERIES_CODES))
    sub.add_argument("--lo", type=int, default=None)
    sub.add_argument("--hi", type=int, default=None)
    sub.add_argument("--samples-per-octave", type=int, default=64,
                     help="log-grid density (profile series only)")
    sub.add_argument("--out", help="output path")
    sub.set_defaults(func=cmd_diagnose)

    sub = commands.add_parser("selfsim", help="dyadic-decimated fluctuation profiles")
    add_trace_flags(sub, default_horizon=10**6)
    sub.add_argument("--levels", default="0..5",
                     help="decimation exponents, e.g. 0..5 or 1,3,5")
    sub.add_argument("--out-dir", help="directory for the per-level files")
    sub.set_defaults(func=cmd_selfsim)

    sub = commands.add_parser("freq", help="value-frequency analysis")
    add_trace_flags(sub, default_horizon=10**7)
    sub.add_argument("--kmax", type=int, default=15, help="largest block exponent")
    sub.add_argument("--m-cap", type=int, default=None,
                     help="largest tracked value index (default horizon/2)")
    sub.add_argument("--out", help="report path")
    sub.add_argument("--data-out", help="F(m) data file path")
    sub.set_defaults(func=cmd_freq)

    sub = commands.add_parser("seeds", help="classify seeds against the survey table")
    sub.add_argument("--length", type=int, default=3, choices=(2, 3))
    sub.add_argument("--max-value", type=int, default=3)
    sub.add_argument("--horizon", type=int, default=10**6)
    sub.add_argument("--perturbation", choices=[p.value for p in Perturbation],
                     default=Perturbation.ALTERNATING.value)
    sub.add_argument("--out", help="survey file path")
    sub.add_argument("--no-file", action="store_true",
                     help="print only, skip the survey file")
    sub.set_defaults(func=cmd_seeds)

    sub = commands.add_parser("verify", help="run the reproducibility checklist")
    sub.add_argument("--suite", choices=("paper",), default="paper")
    sub.add_argument("--only", help="criterion numbers, e.g. 1..5 or 7,12")
    sub.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except QseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
