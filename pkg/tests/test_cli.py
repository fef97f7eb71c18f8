import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hsk.cli import fmt_float, main
from hsk.twkernel import bessel_coefficients, bessel_recurrence


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_spec(path, theta=1.0, n=240, M=None, tail=True, L=None):
    rec = bessel_recurrence(theta)
    a = bessel_coefficients(theta, n - 1)
    M = rec.M if M is None else M
    L = rec.L if L is None else L
    r_ = lambda v: repr(float(v))
    lines = ["# Bessel data", f"tail_bound = {r_(a.tail)}" if tail else "",
             f"weighted_tail_bound = {r_(a.weighted_tail)}", "[L]"]
    lines += [f"{r_(r[0])} {r_(r[1])}" for r in L]
    lines += ["[M]"] + [f"{r_(r[0])} {r_(r[1])}" for r in M]
    lines += ["[coefficients]"] + [f"{x} {r_(v[0])} {r_(v[1])}" for x, v in enumerate(a.values)]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_fmt_float_17_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(math.pi)) == math.pi


def test_bessel_json(capsys):
    code, out, _ = run(capsys, "bessel", "--theta", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["command"] == "bessel"
    assert len(doc["tables"]["J"]) == 41
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_factorize_theta(capsys):
    code, out, _ = run(capsys, "factorize", "--theta", "4")
    doc = json.loads(out)
    assert code == 0
    names = {c["name"] for c in doc["checks"]}
    assert {"factorization_error", "factorization_certified", "symbol_tail"} <= names
    assert doc["tables"]["conditions"][0]["verdict"] == "pass"


def test_factorize_spec_file(tmp_path, capsys):
    spec = write_spec(tmp_path / "bessel.txt")
    code, out, _ = run(capsys, "factorize", "--spec-file", str(spec), "--size", "16", "--tail", "200")
    assert code == 0, out
    assert json.loads(out)["parameters"]["sign"] == 1


def test_factorize_spec_file_condition_failure(tmp_path, capsys):
    spec = write_spec(tmp_path / "bad.txt", M=[[2.0, 0.0], [0.0, 2.0]])
    code, out, _ = run(capsys, "factorize", "--spec-file", str(spec), "--size", "16", "--tail", "200")
    assert code == 1
    doc = json.loads(out)
    assert doc["tables"]["conditions"][0]["verdict"] == "fail"
    assert any("det M" in n for n in doc["notes"])


@pytest.mark.parametrize("mutate", ["no_tail", "bad_row", "missing_section", "bad_number"])
def test_spec_file_input_errors(tmp_path, capsys, mutate):
    p = write_spec(tmp_path / "s.txt", n=20, tail=(mutate != "no_tail"))
    text = p.read_text()
    if mutate == "bad_row":
        text = text.replace("[M]\n", "[M]\n1 2 3\n")
    elif mutate == "missing_section":
        text = text.replace("[L]", "[Q]")
    elif mutate == "bad_number":
        text = text.replace("[coefficients]\n0 ", "[coefficients]\n0 x")
    p.write_text(text)
    code, _, err = run(capsys, "factorize", "--spec-file", str(p))
    assert code == 2 and "error" in err


def test_missing_spec_file(capsys, tmp_path):
    code, _, _ = run(capsys, "factorize", "--spec-file", str(tmp_path / "nope.txt"))
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["bessel", "--theta", "-1"],
    ["factorize", "--theta", "1", "--size", "1"],
    ["spectrum", "--theta", "1", "--cluster-tol", "0"],
    ["hardy", "--rational", "1.5"],
    ["hardy", "--nodes", "3"],
    ["hilbert", "--sizes", "64,16"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--theta", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["parameters"]["kernel_dimension"] > 0
    assert doc["parameters"]["mpt_flags"] == 0


def test_hardy_with_rational(capsys):
    code, out, _ = run(capsys, "hardy", "--rational", "0.5", "--size", "20")
    doc = json.loads(out)
    assert code == 0 and doc["parameters"]["rank"] == 1


def test_hilbert_csv(capsys):
    code, out, _ = run(capsys, "hilbert", "--sizes", "4,8,16", "--format", "csv")
    assert code == 0
    assert "\r\n" in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["section", "name", "index", "value", "bound", "status"]
    checks = [r for r in rows if r[0] == "check"]
    assert checks and all(r[5] == "pass" for r in checks)


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "bessel", "--theta", "0.25", "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["command"] == "bessel"


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "bessel", "--theta", "1", "--timing")
    assert "duration_s" in out
    _, out, _ = run(capsys, "bessel", "--theta", "1")
    assert "duration_s" not in out


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("HSK_THREADS", "1")
    assert run(capsys, "bessel", "--theta", "1")[0] == 0
    monkeypatch.setenv("HSK_THREADS", "zero")
    assert run(capsys, "bessel", "--theta", "1")[0] == 2


def test_no_nan_in_json(capsys):
    _, out, _ = run(capsys, "spectrum", "--theta", "0.25", "--size", "16")
    assert "NaN" not in out and "Infinity" not in out


def test_subprocess_entry_point():
    p = subprocess.run([sys.executable, "-m", "hsk", "bessel", "--theta", "1", "--format", "csv"],
                       capture_output=True)
    assert p.returncode == 0 and p.stdout.startswith(b"section,name")
