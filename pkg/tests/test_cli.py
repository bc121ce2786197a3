import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from chelyshkov_ide.benchmarks import get_benchmark
from chelyshkov_ide.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_example_two_point_table():
    code, out, _ = call("--example", "2", "--N", "4", "--nu", "0.5", "--points", "0.1,0.3,0.5,0.7,0.9",
                        "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "x,exact,approx,abs_error"
    table = rows(out)
    ref = get_benchmark(2).reference["approx_nu_half"]
    for r, published in zip(table, ref):
        assert float(r["approx"]) == pytest.approx(published, abs=1e-12)
        assert abs(float(r["exact"]) - float(r["approx"])) <= 1e-12
    code, text, _ = call("--example", "2", "--N", "4", "--nu", "0.5", "--points", "0.1,0.3,0.5,0.7,0.9")
    assert code == 0 and "0.8535533905932" in text


def test_example_five_sweep_csv():
    code, out, _ = call("--example", "5", "--sweep", "2:20:2", "--nu", "0.5", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "N,nu,l2_error,iterations,seconds"
    table = rows(out)
    assert [int(r["N"]) for r in table] == list(range(2, 21, 2))
    errs = [float(r["l2_error"]) for r in table]
    assert all(b <= a or b <= 1e-13 for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-12


def test_example_one_reports_history():
    code, out, _ = call("--example", "1", "--N", "1")
    assert code == 0
    history = [line for line in out.splitlines() if line.strip().startswith("W_")]
    assert len(history) == 6
    assert "0.0705236979434" in out and "0.211571093830" in out
    assert "coefficients = [" in out


def test_json_output():
    code, out, _ = call("--example", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] and doc["N"] == 4 and doc["nu"] == 0.5
    assert max(p["abs_error"] for p in doc["points"]) <= 1e-12


def test_out_and_plot_data(tmp_path):
    report = tmp_path / "r.csv"
    plot = tmp_path / "plot.csv"
    code, out, _ = call("--example", "5", "--format", "csv", "--out", str(report), "--emit-plot-data", str(plot))
    assert code == 0 and out == ""
    assert report.read_text().startswith("x,exact,approx,abs_error")
    lines = plot.read_text().splitlines()
    assert lines[0] == "x,exact,approx" and len(lines) == 202
    data = np.loadtxt(plot, delimiter=",", skiprows=1)
    np.testing.assert_allclose(data[:, 0], np.linspace(0, 1, 201))


def test_problem_file_run(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("alpha = 1\nc = 0\ng = 1 - x/4\nk = x*t\nf = y^2\nexact = x\n", encoding="utf-8")
    code, out, _ = call("--problem", str(path), "--N", "2", "--format", "csv")
    assert code == 0
    assert max(float(r["abs_error"]) for r in rows(out)) <= 1e-13


def test_alpha_override_family():
    vals = []
    for a in ("0.25", "0.5", "0.75", "1"):
        code, out, _ = call("--example", "3", "--alpha", a, "--points", "0.5", "--format", "csv")
        assert code == 0
        vals.append(float(rows(out)[0]["abs_error"]))
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize(
    "argv",
    [
        (),
        ("--example", "9"),
        ("--example", "1", "--problem", "x.txt"),
        ("--example", "1", "--sweep", "5:2"),
        ("--example", "1", "--N", "-1"),
        ("--example", "1", "--nu", "0.5,0.25"),
        ("--example", "1", "--points", "0.5,2"),
        ("--example", "1", "--format", "xml"),
        ("--problem", "/nonexistent/problem.txt"),
    ],
)
def test_usage_errors_exit_one(argv):
    code, _, err = call(*argv)
    assert code == 1
    assert "error" in err


def test_bad_problem_file_exit_one(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("alpha = 1/2\nc = 0\ng = x +\nk = 1\nf = y\n", encoding="utf-8")
    code, _, err = call("--problem", str(path))
    assert code == 1 and "line 3" in err


def test_non_convergence_exit_two():
    code, out, err = call("--example", "1", "--max-iter", "1")
    assert code == 2
    assert "NOT converged" in out and "did not converge" in err


def test_csv_determinism():
    args = ("--example", "5", "--N", "8", "--format", "csv")
    assert call(*args)[1] == call(*args)[1]
    sweep = ("--example", "5", "--sweep", "2:8:2", "--format", "csv", "--no-timing")
    a, b = call(*sweep)[1], call(*sweep)[1]
    assert a == b and ",," not in a.splitlines()[1][:-1]
    timed = ("--example", "5", "--sweep", "2:8:2", "--format", "csv")
    strip = lambda text: [r.rsplit(",", 1)[0] for r in text.splitlines()]  # noqa: E731
    assert strip(call(*timed)[1]) == strip(call(*timed)[1])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "chelyshkov_ide", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--sweep" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "chelyshkov_ide", "--example", "7"], capture_output=True, text=True)
    assert proc.returncode == 1
