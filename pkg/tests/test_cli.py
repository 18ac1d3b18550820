import json

import numpy as np
import pytest

from ccsym.cli import main
from ccsym.panel import ReturnPanel, panel_to_csv


@pytest.fixture
def panel_file(tmp_path, rng):
    dates = np.datetime64("2019-01-01") + np.arange(400)
    values = rng.standard_normal((400, 3))
    path = tmp_path / "panel.csv"
    path.write_text(panel_to_csv(ReturnPanel(dates, values, ["a", "b", "c"], np.zeros(values.shape, bool))))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_test_json(capsys, panel_file):
    code, out, _ = run(capsys, "test", "--input", panel_file, "--m", 50, "--seed", 7)
    assert code == 0
    doc = json.loads(out)
    assert doc["m"] == 50 and doc["seed"] == 7 and doc["t"] == 400 and doc["n"] == 3
    assert doc["block_length"] == 9 == doc["config"]["block_length_used"]
    assert doc["config"]["block_length"] == "auto"
    assert 0 <= doc["p_value"] <= 1


def test_report_regenerated_from_echo(capsys, panel_file, tmp_path):
    out_path = tmp_path / "r.json"
    assert run(capsys, "test", "--input", panel_file, "--m", 30, "--seed", 3, "--output", out_path)[0] == 0
    first = out_path.read_text()
    cfg = json.loads(first)["config"]
    argv = ["test", "--input", cfg["input"], "--format", cfg["format"], "--m", cfg["m"], "--seed", cfg["seed"],
            "--block-length", cfg["block_length"], "--scheme", cfg["scheme"]]
    assert run(capsys, *argv)[1] == first


def test_test_csv(capsys, panel_file):
    code, out, _ = run(capsys, "test", "--input", panel_file, "--m", 20, "--output-format", "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# config: ")
    assert lines[1].startswith("statistic,scaled_statistic,p_value,m,block_length")


def test_by_year(capsys, panel_file):
    code, out, _ = run(capsys, "by-year", "--input", panel_file, "--m", 20, "--levels", "0.01,0.05,0.10")
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "year,T,statistic,scaled_statistic,p_value,reject_1pct,reject_5pct,reject_10pct"
    assert [l.split(",")[:2] for l in lines[2:]] == [["2019", "365"]]
    assert json.loads(lines[0][10:])["input"] == str(panel_file)


def test_by_year_json_reports_skipped(capsys, panel_file):
    code, out, _ = run(capsys, "by-year", "--input", panel_file, "--m", 20, "--output-format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["m_tests"] == 1
    assert doc["skipped"] == [{"year": 2020, "T": 35, "reason": "T < min_obs (50)"}]


def test_power(capsys):
    code, out, _ = run(capsys, "power", "--gammas", "-0.8:0.4:0", "--t", "40", "--n", "2", "--mc", 3, "--m", 20)
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "gamma,T,N,level,rejection_rate,mc_se,mc_reps,seed"
    assert [l.split(",")[0] for l in lines[2::3]] == ["-0.8", "-0.4", "0.0"]


def test_diag_and_pseudo(capsys, panel_file):
    code, out, _ = run(capsys, "diag", "--input", panel_file, "--a", "0,1")
    assert code == 0 and len(out.splitlines()) == 1 + 3 * 2
    code, out, _ = run(capsys, "pseudo", "--input", panel_file)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "date,a,b,c" and len(lines) == 401
    assert all(0 < float(v) < 1 for v in lines[1].split(",")[1:])


@pytest.mark.parametrize(
    "argv, code, msg",
    [
        (["test", "--input", "/nonexistent.csv"], 1, "input error"),
        (["test", "--input", "{bad}"], 1, "non-numeric"),
        (["test", "--input", "{panel}", "--m", "0"], 2, "replicates"),
        (["test", "--input", "{panel}", "--block-length", "400"], 2, "block length"),
        (["test", "--input", "{panel}", "--threads", "0"], 2, "threads"),
        (["by-year", "--input", "{panel}", "--min-obs", "1000"], 1, "no year"),
        (["power", "--gammas", "0", "--t", "40", "--n", "2", "--mc", "0"], 2, "mc_reps"),
        (["test"], 2, "required"),
    ],
)
def test_exit_codes(capsys, tmp_path, panel_file, argv, code, msg):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,a,b\n2020-01-01,1,oops\n")
    argv = [a.replace("{panel}", str(panel_file)).replace("{bad}", str(bad)) for a in argv]
    got, _, err = run(capsys, *argv)
    assert got == code
    assert msg in err
    if code != 2 or argv != ["test"]:
        assert len(err.strip().splitlines()) == 1
