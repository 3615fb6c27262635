import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nystromlab.cli import ExperimentConfig, main, read_config_file, run
from nystromlab.data import Dataset, write_dataset
from nystromlab.errors import ConfigError
from nystromlab.experiments import loglog_slope

SMALL = ["--N", "150", "--p", "2", "--seeds", "3"]


def _run(tmp_path, *args, name="out.json"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def test_scaling_slope_matches_regression_on_csv(tmp_path):
    args = ["scaling", *SMALL, "--m-grid", "10,20,40,80"]
    code, js = _run(tmp_path, *args)
    assert code == 0
    code, cs = _run(tmp_path, *args, "--out-format", "csv", name="out.csv")
    assert code == 0
    rows = list(csv.DictReader(open(cs)))
    ms = sorted({int(r["m"]) for r in rows})
    med = [np.median([float(r["error"]) for r in rows if int(r["m"]) == m]) for m in ms]
    report = json.load(open(js))
    assert report["schema_version"] == 1
    assert report["report"]["slope"] == pytest.approx(loglog_slope(ms, med), rel=1e-12)
    assert report["report"]["reference_slope"] == -1.0


@pytest.mark.parametrize("command, extra", [
    ("approx", ["--m", "20"]),
    ("bounds", ["--m-grid", "10,20"]),
    ("spectrum", ["--m", "20"]),
    ("scaling", ["--m-grid", "10,20,40"]),
    ("lowerbound", ["--m", "3", "--samplings", "2"]),
    ("classify", ["--m", "20", "--lambda", "0.01", "--p", "2.8"]),
])
def test_every_command_deterministic_across_workers(tmp_path, command, extra):
    base = ["--N", "150", "--seeds", "2", "--master-seed", "11", *extra]
    if command not in ("lowerbound", "classify"):
        base += ["--p", "2"]
    c1, a = _run(tmp_path, command, *base, "--workers", "1", name="a.json")
    c2, b = _run(tmp_path, command, *base, "--workers", "3", name="b.json")
    assert c1 == c2 == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["command"] == command and "workers" not in doc["config"]
    assert doc["config"]["trial_seeds"] == [int(s) for s in doc["config"]["trial_seeds"]]


def test_m_exceeds_n_exit_2_no_output(tmp_path, capsys):
    code, out = _run(tmp_path, "approx", "--N", "30", "--p", "2", "--m", "40")
    assert code == 2 and not out.exists()
    assert "exceeds" in capsys.readouterr().err


def test_m_exceeds_dataset_size(tmp_path):
    p = tmp_path / "d.csv"
    write_dataset(p, Dataset(np.random.default_rng(0).standard_normal((10, 2))))
    code, out = _run(tmp_path, "approx", "--data", str(p), "--m", "11")
    assert code == 2 and not out.exists()


@pytest.mark.parametrize("args", [
    ["approx", "--m", "5"],                                     # no source
    ["approx", "--N", "20", "--m", "5"],                        # power law without p
    ["scaling", "--N", "20", "--p", "2", "--m-grid", "5"],      # one-point grid
    ["bounds", "--N", "20", "--spectrum", "eigengap", "--m", "5"],
    ["approx", "--N", "20", "--p", "2", "--m", "5", "--delta", "2"],
    ["approx", "--N", "20", "--p", "2", "--m", "5", "--seeds", "0"],
    ["bounds", "--N", "20", "--p", "2", "--m", "5", "--which", "nonsense"],
])
def test_config_errors_exit_2(tmp_path, args):
    code, out = _run(tmp_path, *args)
    assert code == 2 and not out.exists()


def test_data_error_exit_3(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,oops\n")
    code, out = _run(tmp_path, "approx", "--data", str(p), "--m", "1")
    assert code == 3 and not out.exists()
    assert "line 2" in capsys.readouterr().err


def test_numerical_error_exit_4(tmp_path):
    p = tmp_path / "K.csv"
    np.savetxt(p, np.diag([1.0, -1.0, 2.0]), delimiter=",")
    code, out = _run(tmp_path, "approx", "--data", str(p), "--format", "matrix", "--kernel", "precomputed",
                     "--m", "2", "--seed-list", "0,1,2")
    assert code == 4 and not out.exists()


def test_matrix_and_dataset_sources(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((40, 2))
    y = np.where(X[:, 0] > 0, 1.0, -1.0)
    dp = tmp_path / "d.csv"
    write_dataset(dp, Dataset(X, y))
    code, out = _run(tmp_path, "classify", "--data", str(dp), "--m", "10", "--lambda", "0.05", "--seeds", "2")
    assert code == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["N"] == 30 and rep["n_test"] == 10 and rep["full"]["duality_gap"] <= 1e-9
    G = X @ X.T
    kp = tmp_path / "K.csv"
    np.savetxt(kp, G, delimiter=",", fmt="%.17g")
    code, out = _run(tmp_path, "approx", "--data", str(kp), "--format", "matrix", "--kernel", "precomputed",
                     "--m", "2", "--seeds", "2")
    assert code == 0
    # a rank-2 kernel is reproduced exactly by two generic columns
    assert json.loads(out.read_text())["report"]["max_error"] < 1e-8


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("N = 120\np = 2\nm-grid = 10, 20\nseeds = 2\nmaster_seed = 5\nlambda = 0.5\n")
    settings = read_config_file(cfg)
    assert settings["m_grid"] == [10, 20] and settings["lam"] == 0.5
    code, out = _run(tmp_path, "scaling", "--config", str(cfg), "--seeds", "3")
    assert code == 0
    resolved = json.loads(out.read_text())["config"]
    assert resolved["seeds"] == 3 and resolved["master_seed"] == 5 and resolved["N"] == 120


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[experiment]\nbogus = 1\n")
    with pytest.raises(ConfigError):
        read_config_file(cfg)
    assert main(["approx", "--config", str(cfg)]) == 2


def test_json_full_precision(tmp_path):
    code, out = _run(tmp_path, "approx", *SMALL, "--m", "7")
    doc = json.loads(out.read_text())
    text = out.read_text()
    v = doc["report"]["median_error"]
    assert repr(v) in text  # shortest round-trip representation, i.e. full double precision


def test_run_returns_text_without_out():
    text = run(ExperimentConfig("spectrum", N=64, p=2.0, m=8))
    doc = json.loads(text)
    assert doc["report"]["power_law"]["p"] == pytest.approx(2.0)
    assert doc["report"]["eigengap"]["r"] >= 1


def test_eigengap_source_bounds(tmp_path):
    code, out = _run(tmp_path, "bounds", "--N", "200", "--spectrum", "eigengap", "--r", "5", "--rho", "0.25",
                     "--m-grid", "20,40", "--seeds", "3", "--which", "eigengap")
    assert code == 0
    reps = json.loads(out.read_text())["report"]["reports"]
    assert [r["context"]["eigengap_r"] for r in reps] == [5, 5]
    assert all(r["holds_fraction"]["eigengap"] == 1.0 for r in reps)


def test_console_entry_point(tmp_path):
    out = tmp_path / "x.json"
    res = subprocess.run([sys.executable, "-m", "nystromlab", "approx", *SMALL, "--m", "5", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert json.loads(out.read_text())["command"] == "approx"
