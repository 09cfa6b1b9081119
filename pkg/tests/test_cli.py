import csv
import subprocess
import sys

import pytest

from ibnls.cli import ConfigError, build_parser, main, parse_config


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


# --- configuration parsing --------------------------------------------------


def test_empty_file_with_flags_is_valid():
    cfg = parse_config("", "classify", {"dim": "6", "b": "1", "alpha": "3"})
    assert cfg.params.dim == 6 and cfg.params.alpha == 3


def test_sections_and_comments():
    text = "dim = 1  # comment\nb = 1/2\nalpha = 3\n[grid]\npoints = 64\n# skip\n[solver]\ndt = 1e-2\n"
    cfg = parse_config(text, "simulate")
    assert cfg["grid.points"] == 64 and cfg["solver.dt"] == 0.01
    assert cfg.sources["grid.points"] == "line 5"
    assert cfg.sources["grid.length"] == "default"


def test_flag_overrides_file():
    cfg = parse_config("dim = 5\nb = 1\nalpha = 2\n", "classify", {"alpha": "3"})
    assert cfg["alpha"] == 3 and cfg.sources["alpha"] == "command line"


def test_zero_denominator_is_malformed():
    with pytest.raises(ConfigError, match="line 3.*alpha.*zero denominator"):
        parse_config("dim = 5\nb = 1\nalpha = 8/0\n", "classify")


def test_duplicate_key_names_both_lines():
    with pytest.raises(ConfigError, match=r"line 4: duplicate key 'dim' \(first set on line 1\)"):
        parse_config("dim = 5\nb = 1\nalpha = 2\ndim = 6\n", "classify")


def test_unknown_key_has_line_number():
    with pytest.raises(ConfigError, match="line 2: unknown key 'dimension'"):
        parse_config("b = 1\ndimension = 5\n", "classify")


def test_missing_required_key():
    with pytest.raises(ConfigError, match="missing required key 'alpha'"):
        parse_config("dim = 5\nb = 1\n", "classify")


def test_malformed_line():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("dim 5\n", "classify")


def test_seed_precedence():
    assert parse_config("seed = 4\n", "estimate-probe").seed == 4
    assert parse_config("seed = 4\n", "estimate-probe", seed=9).seed == 9
    with pytest.raises(ConfigError):
        parse_config("", "estimate-probe", seed=-1)


# --- subcommands ------------------------------------------------------------


def test_classify_energy_critical_example(tmp_path, capsys):
    code, out = run(tmp_path, "classify", "--dim", "6", "--b", "1", "--alpha", "3")
    assert code == 0
    lines = capsys.readouterr().out.splitlines()
    verdicts = [l for l in lines if l.startswith("Thm_EnergyCritical,")]
    assert verdicts == ["Thm_EnergyCritical,true,"]
    assert read_csv(out / "classify.csv")[0]["class"] == "EnergyCritical"
    assert {"manifest.txt", "summary.txt", "verdicts.csv"} <= {p.name for p in out.iterdir()}


def test_classify_single_theorem(tmp_path, capsys):
    code, _ = run(tmp_path, "classify", "--dim", "6", "--b", "1", "--alpha", "3", "--theorem", "Thm_EnergyCritical")
    assert code == 0
    verdicts = [l for l in capsys.readouterr().out.splitlines() if l.startswith("Thm")]
    assert verdicts == ["Thm_EnergyCritical,true,"]


def test_pairs_energy_critical_rows(tmp_path, capsys):
    code, out = run(tmp_path, "pairs", "--lemma", "4.1", "--dim", "6", "--b", "1")
    assert code == 0
    rows = read_csv(out / "pairs.csv")
    assert {"name": "q_crit", "q": "20/3", "r": "5/2", "s": "0", "admissible": "true"} in rows
    ids = read_csv(out / "identities.csv")
    assert list(ids[0]) == ["identity", "lhs", "rhs", "holds"]
    assert all(r["holds"] == "true" for r in ids)
    assert "q_crit,20/3,5/2,0,true" in capsys.readouterr().out


def test_pairs_rejected_precondition_exits_2(tmp_path):
    code, _ = run(tmp_path, "pairs", "--lemma", "4.1", "--dim", "12", "--b", "1/100")
    assert code == 2


@pytest.mark.parametrize("dt", ["0", "-1e-3"])
def test_simulate_nonpositive_dt_exits_2(tmp_path, dt):
    code, _ = run(tmp_path, "simulate", "--dim", "1", "--b", "1/2", "--alpha", "3", "--dt", dt)
    assert code == 2


def test_usage_errors_exit_2(tmp_path):
    assert main([]) == 2
    assert main(["nope"]) == 2
    assert main(["classify", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_simulate_then_norm_and_strichartz(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("dim = 1\nb = 1/2\nalpha = 3\n[grid]\npoints = 128\nlength = 40\n[solver]\ndt = 1e-3\nt_end = 0.02\n")
    code, out = run(tmp_path, "simulate", "--config", str(cfg))
    assert code == 0
    rows = read_csv(out / "trajectory.csv")
    assert list(rows[0]) == ["t", "mass", "energy", "h2_norm", "linf", "boundary_mass"]
    assert len(rows) == len(list((out / "fields").glob("*.ibnl"))) == 3
    capsys.readouterr()
    assert main(["norm", "--traj", str(out), "--q", "inf", "--r", "2", "--out", str(tmp_path / "n")]) == 0
    value = float(capsys.readouterr().out.strip())
    assert value == pytest.approx(float(rows[0]["mass"]) ** 0.5, rel=1e-12)
    assert main(["strichartz", "--traj", str(out), "--s", "0", "--out", str(tmp_path / "s")]) == 0


def test_strichartz_with_pairs_file(tmp_path, capsys):
    code, out = run(tmp_path, "simulate", "--dim", "1", "--b", "1/2", "--alpha", "3", "--points", "64", "--t-end", "0.01")
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("q,r\ninf,2\n10,10\n")
    code = main(["strichartz", "--traj", str(out), "--s", "0", "--pairs", str(pairs), "--out", str(tmp_path / "s")])
    assert code == 0
    rows = read_csv(tmp_path / "s" / "strichartz.csv")
    assert [(r["q"], r["r"]) for r in rows] == [("inf", "2"), ("10", "10")]
    bad = tmp_path / "bad.csv"
    bad.write_text("4,4\n")
    assert main(["strichartz", "--traj", str(out), "--s", "0", "--pairs", str(bad), "--out", str(tmp_path / "b")]) == 2


def test_picard_small_data_passes(tmp_path):
    code, out = run(
        tmp_path, "picard", "--dim", "1", "--b", "1/2", "--alpha", "3", "--t-end", "0.05", "--data-h2-norm", "1e-3"
    )
    assert code == 0
    rows = read_csv(out / "picard.csv")
    assert list(rows[0]) == ["iter", "distance", "ratio"]
    assert rows[0]["ratio"] == "" and all(float(r["ratio"]) < 0.5 for r in rows[1:])


def test_manifest_has_no_timestamp_and_lists_sources(tmp_path):
    _, out = run(tmp_path, "classify", "--dim", "6", "--b", "1", "--alpha", "2")
    text = (out / "manifest.txt").read_text()
    assert text.startswith("ibnls ")
    assert "alpha = 2  # command line" in text and "lambda = 1  # default" in text
    assert "seed = 0" in text


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ibnls.cli", "classify", "--dim", "6", "--b", "1", "--alpha", "2", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "Thm_GWPH2,true," in proc.stdout


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["simulate", "--help"])
    assert "(default 512)" in capsys.readouterr().out
