#!/usr/bin/env python3
"""Regenerate the plot-ready data files behind the empirical claims.

Produces two-column text files (gnuplot/pgfplots friendly) in --out-dir:

  growth.dat          Q(n) on a log-spaced grid: the n/2 growth overview
  fluct_log.dat       doubled fluctuation 2Q(n) - n on the same log grid
  selfsim_k{K}.dat    decimated fluctuation overlays for each level K
  renorm_odd.dat      odd-position renormalization residual Q(4k-2) - 2Q(2k-1)
  renorm_even.dat     even-position residual Q(4k) - 2Q(2k)
  freq_F.dat          occurrence count F(m) for m < 2^(kmax+1)
  peaks.dat           per-block peak position, count, and ratio to 4/3
  seed_table.txt      the survey of all length-3 seeds with entries 1..3

Everything is derived from a single run of the alternating-perturbation
recursion from seed (1,1), so the files are deterministic.
"""

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qseq.cli import format_series_lines, seed_row, write_text
from qseq.diagnostics import log_profile, selfsim_profile, series
from qseq.engine import Perturbation, RecursionConfig, Seed, run
from qseq.frequency import build_frequency, peak_scan
from qseq.seedlab import DEFAULT_MAX_SHIFT, classify, enumerate_seeds


def log_grid(n_max: int, samples_per_octave: int) -> np.ndarray:
    count = int(samples_per_octave * np.log2(n_max)) + 1
    x = np.arange(count) / samples_per_octave
    n = np.clip(np.rint(np.exp2(x)).astype(np.int64), 1, n_max)
    return np.unique(n)


def strided(ser, max_points: int):
    step = max(1, len(ser.x) // max_points)
    return type(ser)(x=ser.x[::step], y=ser.y[::step], halves=ser.halves)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="figure-data")
    parser.add_argument("--horizon", type=int, default=10**7)
    parser.add_argument("--survey-horizon", type=int, default=10**6)
    parser.add_argument("--levels", type=int, default=8,
                        help="largest self-similarity decimation exponent")
    parser.add_argument("--kmax", type=int, default=15,
                        help="largest dyadic block exponent")
    parser.add_argument("--samples-per-octave", type=int, default=64)
    parser.add_argument("--max-points", type=int, default=200_000,
                        help="stride long series down to roughly this many rows")
    args = parser.parse_args()

    out = Path(args.out_dir)
    written = []

    def emit(name: str, lines) -> None:
        path = out / name
        write_text(path, list(lines))
        written.append(path)
        print(f"wrote {path}")

    print(f"running seed (1,1) to n = {args.horizon:,} ...")
    trace = run(RecursionConfig(seed=Seed((1, 1)), horizon=args.horizon))

    grid = log_grid(args.horizon, args.samples_per_octave)
    q = trace.values
    emit("growth.dat", (f"{n} {int(q[n])}" for n in grid))
    emit("fluct_log.dat",
         format_series_lines(log_profile(trace, args.samples_per_octave)))

    for k in range(0, args.levels + 1):
        profile = strided(selfsim_profile(trace, k), args.max_points)
        emit(f"selfsim_k{k}.dat", format_series_lines(profile))

    for name, code in (("renorm_odd.dat", "Rodd"), ("renorm_even.dat", "Reven")):
        emit(name, format_series_lines(strided(series(trace, code), args.max_points)))

    print("building the frequency table ...")
    table = build_frequency(trace)
    m_hi = 2 ** (args.kmax + 1) - 1
    emit("freq_F.dat", (f"{m} {int(table.counts[m])}" for m in range(1, m_hi + 1)))

    peak_lines = []
    for info in peak_scan(table, 0, args.kmax):
        gap = float(abs(info.ratio - Fraction(4, 3)))
        peak_lines.append(f"{info.k} {info.peak_m} {info.peak_count}"
                          f" {float(info.ratio):.6f} {gap:.6f}")
    emit("peaks.dat", peak_lines)

    print(f"classifying seeds at horizon {args.survey_horizon:,} ...")
    reference = run(RecursionConfig(
        seed=Seed((1, 1)), horizon=args.survey_horizon + DEFAULT_MAX_SHIFT,
        perturbation=Perturbation.ALTERNATING,
    ))
    rows = [seed_row(classify(seed, reference, horizon=args.survey_horizon))
            for seed in enumerate_seeds(3, 3)]
    emit("seed_table.txt", rows)

    print(f"done: {len(written)} files in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
