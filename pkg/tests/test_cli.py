"""End-to-end CLI behaviour: exit codes, file formats, checkpoint reuse."""

import pytest

import frozen_values as frozen
import oracle
from qseq import checkpoint
from qseq.cli import EXIT_CONFIG, EXIT_DEATH, EXIT_IO, EXIT_OK, EXIT_OVERFLOW, half_str, main
from qseq.engine import RecursionConfig, Seed, run


def read_lines(path):
    return path.read_text().splitlines()


# ------------------------------------------------------------- exit codes

def test_bad_seed_is_config_error(tmp_path, capsys):
    assert main(["--data-dir", str(tmp_path), "compute", "--seed", "0,1"]) == EXIT_CONFIG
    assert main(["--data-dir", str(tmp_path), "compute", "--seed", "banana"]) == EXIT_CONFIG
    assert "error:" in capsys.readouterr().err


def test_overflow_exit_and_width_escape(tmp_path, capsys):
    big = ["--seed", f"{2**31},{2**31 + 1},3,4", "--horizon", "10"]
    code = main(["--data-dir", str(tmp_path), "compute", *big])
    assert code == EXIT_OVERFLOW
    assert "width=8" in capsys.readouterr().err
    # the wide width absorbs the 2^32 value; the run then dies honestly
    # at step 6 when that value drives the feedback index non-positive
    assert main(["--data-dir", str(tmp_path), "compute", *big, "--width", "8"]) == EXIT_DEATH
    assert "strong death at step 6" in capsys.readouterr().err


def test_dying_run_exits_death(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "compute",
                 "--seed", "1,2,1", "--horizon", "100", "--export"])
    assert code == EXIT_DEATH
    captured = capsys.readouterr()
    assert "weak death at step 41" in captured.err
    assert "40 of 100 values computed" in captured.err
    export = tmp_path / "values_s1-2-1_alternating_w4_n100.dat"
    lines = read_lines(export)
    assert len(lines) == 40
    assert lines[-1] == f"40 {frozen.SEED_121_VALUES[-1]}"


def test_write_failure_exits_io(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("in the way")
    code = main(["diagnose", "--horizon", "50", "--series", "E",
                 "--out", str(blocker / "x.dat")])
    assert code == EXIT_IO
    assert "error:" in capsys.readouterr().err


# ------------------------------------------------------------- compute

def test_compute_writes_checkpoint_and_export(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "compute", "--horizon", "20", "--export"])
    assert code == EXIT_OK
    assert (tmp_path / "trace_s1-1_alternating_w4.qtr").exists()
    lines = read_lines(tmp_path / "values_s1-1_alternating_w4_n20.dat")
    assert lines == [f"{n} {v}" for n, v in enumerate(frozen.FIRST_20_SEED_11, start=1)]
    out = capsys.readouterr().out
    assert "wrote checkpoint" in out


def test_export_to_explicit_path_is_deterministic(tmp_path):
    target = tmp_path / "vals.dat"
    args = ["compute", "--horizon", "500", "--trace", str(tmp_path / "t.qtr"),
            "--export", str(target)]
    assert main(args) == EXIT_OK
    first = target.read_bytes()
    assert main(args) == EXIT_OK
    assert target.read_bytes() == first


def test_data_dir_resolution(tmp_path, monkeypatch, capsys):
    env_dir = tmp_path / "from-env"
    flag_dir = tmp_path / "from-flag"
    monkeypatch.setenv("QSEQ_DATA_DIR", str(env_dir))
    assert main(["compute", "--horizon", "30"]) == EXIT_OK
    assert (env_dir / "trace_s1-1_alternating_w4.qtr").exists()

    assert main(["--data-dir", str(flag_dir), "compute", "--horizon", "30"]) == EXIT_OK
    assert (flag_dir / "trace_s1-1_alternating_w4.qtr").exists()

    monkeypatch.delenv("QSEQ_DATA_DIR")
    monkeypatch.chdir(tmp_path)
    assert main(["compute", "--horizon", "30"]) == EXIT_OK
    assert (tmp_path / "qseq-data" / "trace_s1-1_alternating_w4.qtr").exists()
    capsys.readouterr()


# ------------------------------------------------------------- checkpoints

def test_checkpoint_reuse_extend_and_recompute(tmp_path, capsys):
    trace_path = tmp_path / "t.qtr"
    base = ["compute", "--trace", str(trace_path)]

    assert main(base + ["--horizon", "100"]) == EXIT_OK
    assert "wrote checkpoint" in capsys.readouterr().out
    first_bytes = trace_path.read_bytes()

    assert main(base + ["--horizon", "100"]) == EXIT_OK
    assert "reusing checkpoint" in capsys.readouterr().out
    assert trace_path.read_bytes() == first_bytes

    assert main(base + ["--horizon", "200"]) == EXIT_OK
    assert checkpoint.load(trace_path) == run(RecursionConfig(seed=Seed((1, 1)), horizon=200))

    # a shorter request cannot reuse the longer checkpoint: fresh run, resaved
    assert main(base + ["--horizon", "150"]) == EXIT_OK
    assert checkpoint.load(trace_path).len == 150
    capsys.readouterr()


def test_corrupt_checkpoint_triggers_recompute(tmp_path, capsys):
    trace_path = tmp_path / "t.qtr"
    trace_path.write_bytes(b"not a checkpoint at all")
    assert main(["compute", "--horizon", "50", "--trace", str(trace_path)]) == EXIT_OK
    assert "ignoring unreadable checkpoint" in capsys.readouterr().err
    assert checkpoint.load(trace_path).len == 50


def test_checkpoint_for_other_seed_is_not_reused(tmp_path, capsys):
    trace_path = tmp_path / "t.qtr"
    assert main(["compute", "--seed", "2,1", "--horizon", "80",
                 "--trace", str(trace_path)]) == EXIT_OK
    assert main(["compute", "--seed", "1,1", "--horizon", "80",
                 "--trace", str(trace_path)]) == EXIT_OK
    reloaded = checkpoint.load(trace_path)
    assert reloaded.seed.values == (1, 1)
    capsys.readouterr()


# ------------------------------------------------------------- diagnose

def test_half_str_formatting():
    assert half_str(3) == "1.5"
    assert half_str(-1) == "-0.5"
    assert half_str(0) == "0.0"
    assert half_str(-4) == "-2.0"


def test_diagnose_half_integer_series(tmp_path):
    out = tmp_path / "e.dat"
    code = main(["diagnose", "--horizon", "20", "--series", "E",
                 "--lo", "1", "--hi", "6", "--out", str(out)])
    assert code == EXIT_OK
    assert read_lines(out) == ["1 0.5", "2 0.0", "3 -0.5", "4 1.0", "5 0.5", "6 0.0"]


def test_diagnose_difference_series(tmp_path):
    out = tmp_path / "d.dat"
    code = main(["diagnose", "--horizon", "20", "--series", "D",
                 "--lo", "1", "--hi", "16", "--out", str(out)])
    assert code == EXIT_OK
    q = frozen.FIRST_20_SEED_11
    assert read_lines(out) == [f"{n} {q[n] - q[n - 1]}" for n in range(1, 17)]


@pytest.mark.parametrize("code,picker", [
    ("Rodd", lambda pair: pair[0]),
    ("Reven", lambda pair: pair[1]),
])
def test_diagnose_renorm_split_matches_oracle(tmp_path, code, picker):
    horizon, k_hi = 4000, 1000
    out = tmp_path / f"{code}.dat"
    assert main(["diagnose", "--horizon", str(horizon), "--series", code,
                 "--hi", str(k_hi), "--out", str(out)]) == EXIT_OK
    q, death = oracle.naive_run((1, 1), horizon)
    assert death is None
    expected = "".join(
        f"{k} {picker(oracle.renorm_split(q, k))}\n" for k in range(1, k_hi + 1)
    )
    assert out.read_bytes() == expected.encode()


def test_diagnose_range_error(tmp_path, capsys):
    code = main(["diagnose", "--horizon", "100", "--series", "D",
                 "--lo", "1", "--hi", "100", "--out", str(tmp_path / "x.dat")])
    assert code == EXIT_CONFIG  # D stops at horizon - 1
    assert "error:" in capsys.readouterr().err


def test_diagnose_death_before_analysis(tmp_path, capsys):
    code = main(["diagnose", "--seed", "1,2,1", "--horizon", "100",
                 "--series", "E", "--out", str(tmp_path / "x.dat")])
    assert code == EXIT_DEATH
    assert not (tmp_path / "x.dat").exists()
    capsys.readouterr()


# ------------------------------------------------------------- selfsim

def test_selfsim_writes_one_file_per_level(tmp_path, capsys):
    out_dir = tmp_path / "profiles"
    code = main(["selfsim", "--horizon", "1024", "--levels", "0..2",
                 "--out-dir", str(out_dir)])
    assert code == EXIT_OK
    for k in (0, 1, 2):
        assert (out_dir / f"selfsim_k{k}.dat").exists()

    # level 0 carries the same fluctuation values as the E series, but on
    # the normalized x axis; spot-check the first and last samples
    k0 = read_lines(out_dir / "selfsim_k0.dat")
    assert len(k0) == 1024
    assert k0[0] == f"{1 / 1024:.8f} 0.5"
    e_file = tmp_path / "e.dat"
    assert main(["diagnose", "--horizon", "1024", "--series", "E",
                 "--out", str(e_file)]) == EXIT_OK
    e_lines = read_lines(e_file)
    assert [line.split()[1] for line in k0] == [line.split()[1] for line in e_lines]
    assert k0[-1].split()[0] == "1.00000000"

    # level 1 keeps every second sample
    k1 = read_lines(out_dir / "selfsim_k1.dat")
    assert len(k1) == 512
    assert [line.split()[1] for line in k1] == [line.split()[1] for line in e_lines[1::2]]
    capsys.readouterr()


@pytest.mark.parametrize("levels", ["5..2", "", "abc"])
def test_selfsim_level_parse_errors(tmp_path, capsys, levels):
    code = main(["selfsim", "--horizon", "64", "--levels", levels,
                 "--out-dir", str(tmp_path)])
    assert code == EXIT_CONFIG
    capsys.readouterr()


def test_selfsim_level_beyond_horizon(tmp_path, capsys):
    code = main(["selfsim", "--horizon", "1000", "--levels", "12",
                 "--out-dir", str(tmp_path)])
    assert code == EXIT_CONFIG
    assert "needs horizon" in capsys.readouterr().err


# ------------------------------------------------------------- freq

def test_freq_report_and_data_file(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "freq", "--horizon", "1000", "--kmax", "3"])
    assert code == EXIT_OK
    report = read_lines(tmp_path / "freq_report_s1-1_alternating_w4_n1000.txt")
    assert report[0] == "# frequency report"
    assert report[1] == "n_max 1000"
    assert report[2] == "m_cap 500"
    assert report[3] == "overflow 0"
    # three lines per block: summary, histogram, law prediction
    assert len(report) == 4 + 3 * 4
    assert report[4].startswith("block k=0 range 1..1 ")
    assert report[-3].startswith("block k=3 range 8..15 ")
    assert report[-2].startswith("hist k=3 ")
    assert report[-1] == "law_prediction k=3 3:4 4:2 5:1 6:1"

    data = read_lines(tmp_path / "freq_F_s1-1_alternating_w4_n1000_k3.dat")
    assert [int(line.split()[0]) for line in data] == list(range(1, 16))
    capsys.readouterr()


def test_freq_kmax_needs_enough_m_cap(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "freq", "--horizon", "100", "--kmax", "15"])
    assert code == EXIT_CONFIG
    assert "needs m_cap" in capsys.readouterr().err


def test_freq_rejects_classical_values(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "freq", "--horizon", "1000",
                 "--kmax", "2", "--perturbation", "none"])
    assert code == EXIT_CONFIG
    assert "even value" in capsys.readouterr().err


# ------------------------------------------------------------- seeds

def test_seeds_survey_stdout_and_file(tmp_path, capsys):
    code = main(["--data-dir", str(tmp_path), "seeds",
                 "--length", "2", "--max-value", "2", "--horizon", "20000"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    rows = [line for line in out.splitlines() if line.startswith("seed ")]
    assert len(rows) == 4
    assert rows[0].startswith("seed 1,1 class original death - bad - shift 0 merge_n 1 growth 0.5")
    assert rows[1].startswith("seed 1,2 class weak_death death 5 bad t1 shift - merge_n - growth -")
    assert rows[2].startswith("seed 2,1 class long_lived_irregular death - bad -")
    assert rows[3].startswith("seed 2,2 class weak_death death 5 bad t1")

    survey_file = tmp_path / "seeds_len2_max2_h20000.txt"
    lines = read_lines(survey_file)
    assert lines[0].startswith("# seed survey length 2 entries 1..2 horizon 20000")
    assert lines[1:] == rows


def test_seeds_no_file(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    code = main(["seeds", "--length", "2", "--max-value", "1",
                 "--horizon", "20000", "--no-file"])
    assert code == EXIT_OK
    assert "wrote" not in capsys.readouterr().out
    assert not (tmp_path / "qseq-data").exists()


def test_seeds_length_validation(capsys):
    with pytest.raises(SystemExit):
        main(["seeds", "--length", "5", "--no-file"])
    capsys.readouterr()


# ------------------------------------------------------------- verify

def test_verify_subset_passes(capsys):
    code = main(["verify", "--only", "1..3"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "criterion 01 [PASS]" in out
    assert "criterion 02 [PASS]" in out
    assert "criterion 03 [PASS]" in out
    assert "criterion 04" not in out


def test_verify_growth_criterion_fails_honestly(capsys):
    code = main(["verify", "--only", "10"])
    out = capsys.readouterr().out
    assert code == 1
    assert "criterion 10 [FAIL]" in out
    assert "0.100914" in out


@pytest.mark.parametrize("only", ["0", "99", "12..14"])
def test_verify_rejects_unknown_criterion_numbers(only, capsys):
    # A typo'd number must not succeed vacuously with zero checks run.
    code = main(["verify", "--only", only])
    err = capsys.readouterr().err
    assert code == EXIT_CONFIG
    assert "unknown criterion numbers" in err
    assert "1..13" in err


def test_verify_rejects_garbage_criterion_list(capsys):
    code = main(["verify", "--only", "banana"])
    err = capsys.readouterr().err
    assert code == EXIT_CONFIG
    assert "bad criterion list entry 'banana'" in err
