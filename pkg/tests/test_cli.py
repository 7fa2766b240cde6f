import io
import json
from pathlib import Path

import pytest

from invcnx.cli import main

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden"
FIXTURES = ROOT / "fixtures"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv,golden", [
    (("solve", "--case", "18", "--format", "json"), "solve_18.json"),
    (("solve", "--case", "12", "--format", "json"), "solve_12.json"),
    (("fiber", "--case", "18", "--format", "json"), "fiber_18.json"),
])
def test_golden_json(argv, golden):
    code, out, _ = run(*argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_solve_case18_dimension():
    code, out, _ = run("solve", "--case", "18", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["dimension"] == 3 and doc["status"] == "nonempty"


def test_solve_bound_parameter_and_window():
    code, out, _ = run("solve", "--case", "12", "--param", "alpha=1/2", "--window", "6", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["dimension"] == 1 and doc["params"] == {"alpha": "1/2"}


def test_solve_markdown():
    code, out, _ = run("solve", "--case", "7")
    assert code == 0 and "empty" in out and "certificate" in out


def test_solve_custom_generators(tmp_path):
    gens = tmp_path / "g.txt"
    gens.write_text("(1) dx\n(1) dy\n(x) dx + (y) dy\n", encoding="utf-8")
    code, out, _ = run("solve", "--generators", str(gens), "--format", "json")
    assert code == 0 and json.loads(out)["dimension"] == 0


def test_verify_pass_and_fail(tmp_path):
    code, out, _ = run("verify", "--case", "17", "--fixture", str(FIXTURES / "case17.gamma"))
    assert code == 0 and "pass" in out
    bad = tmp_path / "bad.gamma"
    bad.write_text("G[1][1][1] = -3/(x-y)\n", encoding="utf-8")
    code, out, _ = run("verify", "--case", "17", "--fixture", str(bad), "--format", "json")
    assert code == 2 and json.loads(out)["ok"] is False


def test_verify_parametric_fixture():
    code, _, _ = run("verify", "--case", "18", "--fixture", str(FIXTURES / "case18.gamma"))
    assert code == 0
    code, _, _ = run("verify", "--case", "22", "--r", "1", "--fixture", str(FIXTURES / "case22.gamma"))
    assert code == 0


def test_bracket_commands(tmp_path):
    code, out, _ = run("bracket", "--field", "(1) dx", "--field", "(x^2) dx + (x*y) dy")
    assert code == 0 and "(2*x) dx + (y) dy" in out
    gens = tmp_path / "g.txt"
    gens.write_text("(1) dx\n(x^2) dx\n", encoding="utf-8")
    assert run("bracket", "--generators", str(gens))[0] == 2
    assert run("bracket", "--case", "8")[0] == 0


def test_catalog_command():
    code, out, _ = run("catalog", "--format", "json")
    assert code == 0 and len(json.loads(out)["cases"]) == 28


@pytest.mark.parametrize("argv", [
    (),
    ("solve",),
    ("solve", "--case", "29"),
    ("solve", "--case", "12", "--param", "alpha=2"),
    ("solve", "--case", "12", "--param", "alpha=abc"),
    ("solve", "--case", "12", "--param", "beta=1"),
    ("solve", "--case", "2", "--r", "3"),
    ("verify", "--case", "17"),
    ("verify", "--case", "17", "--fixture", "/nonexistent/file.gamma"),
    ("fiber", "--case", "2", "--point", "1"),
    ("solve", "--case", "1", "--format", "yaml"),
])
def test_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 1 and err


def test_fiber_not_transitive_is_reported():
    code, _, err = run("fiber", "--case", "9")
    assert code != 0 and "NotTransitive" in err


def test_json_deterministic_across_runs_and_workers():
    a = run("report", "--format", "json")[1]
    b = run("report", "--format", "json", "--workers", "4")[1]
    assert a == b
    assert run("solve", "--case", "22", "--r", "1", "--format", "json")[1] == \
        run("solve", "--case", "22", "--r", "1", "--format", "json")[1]


def test_report_all_rows_pass():
    code, out, _ = run("report", "--format", "json")
    doc = json.loads(out)
    assert len(doc["rows"]) == 28
    assert doc["failed"] == [], f"rows disagreeing with the published outcome: {doc['failed']}"
    assert code == 0


def test_report_markdown_notes():
    _, out, _ = run("report")
    assert "alpha = 1/2" in out
    lines = [ln for ln in out.splitlines() if ln.startswith("| 9 ") or ln.startswith("| 21 ")]
    assert all("characterized (infinite-dimensional)" in ln for ln in lines) and len(lines) == 2
