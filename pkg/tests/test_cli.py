"""Golden reports for every germ-level example, run through the command line.

Set UPDATE_GOLDEN=1 to rewrite the files after an intended output change.
"""
import io
import json
import os
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pytest

from multihomog.cli import run

GOLDEN = Path(__file__).parent / "golden"

CASES = [
    # pipeline: analyze
    ("analyze_cusp", ["analyze", "x^2+y^3", "--format", "json"], 0),
    ("analyze_cusp_text", ["analyze", "x^2+y^3"], 0),
    ("analyze_xy", ["analyze", "x*y", "--factors", "x;y", "--format", "json"], 0),
    ("analyze_umbrella", ["analyze", "x^2 - y^2*z", "--factors", "x^2 - y^2*z", "--format", "json"], 0),
    ("analyze_control", ["analyze", "x^5+y^5+x^2*y^2", "-N", "14", "--format", "json"], 0),
    ("analyze_disguised_cusp", ["analyze", "x^2+2*x*y^2+y^4+y^5", "--format", "json"], 0),
    ("analyze_non_reduced", ["analyze", "x^2+x^3", "--format", "json"], 0),
    # refusals
    ("analyze_smooth", ["analyze", "x"], 2),
    ("analyze_smooth_factor", ["analyze", "x*y + 0*z"], 2),
    ("analyze_zero_denominator", ["analyze", "1/0*x"], 2),
    ("analyze_repeated_factor", ["analyze", "x^2*y^3", "--factors", "x;x;y;y;y"], 2),
    ("analyze_order_too_low", ["analyze", "x^2+y^3", "-N", "2"], 2),
    ("analyze_order_cap", ["analyze", "x^2+y^3", "-N", "30"], 2),
    ("torus_irrational", ["torus", "x^2+y^2"], 2),
    # torus
    ("torus_cusp", ["torus", "x^2+y^3", "--format", "json"], 0),
    ("torus_xy", ["torus", "x*y", "--format", "json"], 0),
    ("torus_control", ["torus", "x^5+y^5+x^2*y^2", "--format", "json"], 0),
    ("torus_umbrella", ["torus", "x^2 - y^2*z", "--format", "json"], 0),
    # normal forms
    ("normalize_cusp", ["normalize", "x^2+y^3", "--format", "json"], 0),
    ("normalize_disguised_cusp", ["normalize", "x^2 + 2*x*y^2 + y^4 + y^5", "--format", "json"], 0),
    ("normalize_xy_factors", ["normalize", "x*y", "--factors", "x;y", "--format", "json"], 0),
    # logarithmic derivations
    ("logder_cusp", ["logder", "x^2+y^3", "--format", "json"], 0),
    ("logder_xy", ["logder", "x*y", "--format", "json"], 0),
    ("logder_control", ["logder", "x^5+y^5+x^2*y^2", "--format", "json"], 0),
    ("logder_cusp_level1", ["logder", "x^2+y^3", "-k", "1"], 0),
    # Jacobian ideal test
    ("saito_cusp", ["saito", "x^2+y^3"], 0),
    ("saito_control", ["saito", "x^5+y^5+x^2*y^2"], 0),
    ("saito_disguised_cusp", ["saito", "x^2+2*x*y^2+y^4+y^5", "--format", "json"], 0),
    # invariance
    ("invariance_cusp", ["invariance", "x^2+y^3", "--trials", "10", "--format", "json"], 0),
    ("invariance_control", ["invariance", "x^5+y^5+x^2*y^2", "--trials", "5", "--format", "json"], 0),
    ("invariance_xy", ["invariance", "x*y", "--trials", "3"], 0),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = run(argv)
    return code, out.getvalue(), err.getvalue()


def render(code, out, err):
    return f"exit: {code}\n--- stdout\n{out}--- stderr\n{err}"


@pytest.mark.parametrize("name, argv, code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code):
    got_code, out, err = invoke(argv)
    assert got_code == code, err
    text = render(got_code, out, err)
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("UPDATE_GOLDEN") or not path.exists():
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


def load(name):
    text = (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")
    body = text.split("--- stdout\n", 1)[1].split("--- stderr\n", 1)[0]
    return json.loads(body)


# the golden files carry the expected values; these checks pin the important ones independently


def test_cusp_values():
    d = load("analyze_cusp")
    assert d["torus"]["rank"] == 1 and d["torus"]["weights"] == [[3, 2]] and d["torus"]["multidegrees"] == [6]
    assert d["normalized_equation"] == "x^2 + y^3" and d["quasihomogeneous"] is True


def test_control_values():
    d = load("analyze_control")
    assert d["torus"]["rank"] == 0 and d["quasihomogeneous"] is False
    assert all(m["nilpotent"] for m in d["generator_diagnostics"]["g0"])
    assert d["saito_test"]["evidence"] == "no"


def test_disguised_cusp_values():
    d = load("normalize_disguised_cusp")
    assert d["normalized_equation"] == "x^2 + y^5" and d["normalizing_change"] == ["x - y^2", "y"]


def test_refusal_messages():
    code, out, err = invoke(["analyze", "x"])
    assert code == 2 and out == "" and "smooth" in err
    code, out, err = invoke(["saito", "x^5+y^5+x^2*y^2"])
    assert code == 0 and "evidence: no" in out


def test_file_and_stdin_input(tmp_path, monkeypatch):
    p = tmp_path / "germ.txt"
    p.write_text("x^2+y^3\n")
    assert invoke(["torus", "--file", str(p)])[1] == invoke(["torus", "x^2+y^3"])[1]
    monkeypatch.setattr(sys, "stdin", io.StringIO("x^2+y^3"))
    assert invoke(["torus", "--file", "-"])[1] == invoke(["torus", "x^2+y^3"])[1]


def test_input_errors():
    assert invoke(["analyze"])[0] == 2
    assert invoke(["analyze", "x^2", "--file", "g.txt"])[0] == 2
    assert invoke(["analyze", "--file", "/nonexistent/germ.txt"])[0] == 2
    assert invoke(["invariance", "x*y", "--trials", "0"])[0] == 2


def test_exactly_one_subcommand():
    with pytest.raises(SystemExit) as exc:
        invoke([])
    assert exc.value.code == 2


def test_byte_identical_subprocess_runs():
    argv = [sys.executable, "-m", "multihomog", "analyze", "x^2 - y^2*z", "--format", "json", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b
