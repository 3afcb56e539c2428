import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from wintgen import cli, verify
from wintgen.invariants import Kind

PATCHES = Path(__file__).resolve().parent.parent / "patches"


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_first_kind_point(capsys):
    code, out, _ = run(["eval", "--patch", str(PATCHES / "vranceanu_first_kind.json"),
                        "--at", "0,0"], capsys)
    assert code == 0
    (rep,) = json.loads(out)
    assert (rep["K"], rep["KN"], rep["H2"]) == pytest.approx((2, 2, 4), abs=1e-12)
    assert abs(rep["defect"]) < 1e-12
    assert rep["kind"] == "first" and rep["flags"]["wintgen_ideal"]


def test_eval_sphere_grid(capsys):
    code, out, _ = run(["eval", "--patch", str(PATCHES / "sphere.json"), "--grid", "4x4"], capsys)
    assert code == 0
    reps = json.loads(out)
    assert len(reps) == 16
    assert all(abs(r["defect"]) < 1e-12 and r["flags"]["totally_umbilical"] for r in reps)
    # row-major in (u, v)
    keys = [(r["u"], r["v"]) for r in reps]
    assert keys == sorted(keys)


def test_malformed_expression_leaves_no_file(tmp_path, capsys):
    out = tmp_path / "out.json"
    code, _, err = run(["eval", "--patch", str(PATCHES / "bad_expression.json"),
                        "--out", str(out)], capsys)
    assert code == 2 and "offset 4" in err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_domain_error_names_point(tmp_path, capsys):
    spec = tmp_path / "p.json"
    spec.write_text(json.dumps({"components": ["u", "v", "sqrt(v)"], "domain": [0, 1, -1, 1]}))
    out = tmp_path / "out.csv"
    code, _, err = run(["eval", "--patch", str(spec), "--grid", "3x3", "--format", "csv",
                        "--out", str(out)], capsys)
    assert code == 3
    assert "(u, v)" in err and "sqrt(v)" in err
    assert not out.exists()


def test_degenerate_point_exit_3(tmp_path, capsys):
    spec = tmp_path / "cone.json"
    spec.write_text(json.dumps({"components": ["u*cos(v)", "u*sin(v)", "u"],
                                "domain": [0, 1, 0, 6]}))
    code, _, _ = run(["eval", "--patch", str(spec), "--at", "0,1"], capsys)
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["eval", "--grid", "4x4"],
    ["eval", "--family", "first-kind", "--c1", "1"],
    ["eval", "--family", "first-kind", "--c1", "1", "--c2", "0", "--grid", "0x3"],
    ["eval", "--family", "first-kind", "--c1", "1", "--c2", "0", "--grid", "4"],
    ["eval", "--family", "first-kind", "--c1", "1", "--c2", "0", "--at", "1"],
    ["eval", "--patch", "/nonexistent.json"],
    ["verify", "lemma41", "--count", "0"],
])
def test_input_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_argparse_rejects_nonpositive_tolerance(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["eval", "--patch", "x.json", "--tol", "-1"])
    assert info.value.code == 2


def test_report_round_trip(capsys):
    _, out, _ = run(["eval", "--family", "second-kind", "--c1", "0", "--c2", "-1",
                     "--grid", "3x3"], capsys)
    rows = json.loads(out)
    reports = [cli.PointReport.from_dict(r) for r in rows]
    assert [r.to_dict() for r in reports] == rows
    again = [cli.PointReport.from_dict(json.loads(cli.dumps(r.to_dict()))) for r in reports]
    assert again == reports
    assert all(r.kind == Kind.SECOND and r.KN_signed < 0 for r in reports)


def test_csv_output(capsys):
    _, out, _ = run(["eval", "--family", "exponential", "--c1", "1", "--c2", "0.1",
                     "--grid", "2x3", "--format", "csv"], capsys)
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(cli.CSV_COLUMNS)
    assert len(lines) == 7
    fields = lines[1].split(",")
    assert "semiparallel" in fields[-1].split("|")


def test_classify_output(capsys):
    _, out, _ = run(["classify", "--family", "first-kind", "--c1", "1", "--c2", "0",
                     "--grid", "2x2", "--format", "csv"], capsys)
    lines = out.strip().split("\n")
    assert lines[0] == "u,v,kind,flags"
    assert all(line.split(",")[2] == "first" for line in lines[1:])
    _, out, _ = run(["classify", "--family", "first-kind", "--c1", "1", "--c2", "0",
                     "--at", "0,0"], capsys)
    assert set(json.loads(out)[0]) == {"u", "v", "kind", "flags"}


def test_workers_do_not_change_output(capsys):
    base = ["eval", "--family", "first-kind", "--c1", "2", "--c2", "-1", "--grid", "5x7"]
    _, one, _ = run(base + ["--workers", "1"], capsys)
    _, three, _ = run(base + ["--workers", "3"], capsys)
    assert one == three


def test_grid_inset():
    pts = cli.grid_points((0.0, 1.0, -1.0, 1.0), 2, 3)
    assert pts[0] == (1e-6, -1.0 + 2e-6)
    assert pts[-1][0] == pytest.approx(1 - 1e-6)
    assert len(pts) == 6 and cli.grid_points((0, 1, 0, 1), 1, 1) == [(0.5, 0.5)]


def test_dumps_format():
    text = cli.dumps({"a": 0.1, "b": [1, 2.5, None, True], "c": math.inf, "d": {}})
    assert json.loads(text) == {"a": 0.1, "b": [1, 2.5, None, True], "c": None, "d": {}}
    assert "0.10000000000000001" in text


def test_family_command(tmp_path, capsys):
    out = tmp_path / "fam.json"
    code, stdout, _ = run(["family", "first-kind", "--c1", "1", "--c2", "0", "--out", str(out)],
                          capsys)
    assert code == 0 and "sqrt(cos(2*v))" in stdout
    spec = json.loads(out.read_text())
    assert spec["r"] == "sqrt(cos(2*v))" and spec["family"] == "vranceanu"
    lo, hi = spec["domain"][2:]
    margin = 0.01 * math.pi / 2
    assert lo == pytest.approx(-math.pi / 4 + margin, abs=1e-8)
    assert hi == pytest.approx(math.pi / 4 - margin, abs=1e-8)
    code, stdout, err = run(["family", "exponential", "--c1", "1", "--c2", "0.1"], capsys)
    assert code == 0 and json.loads(stdout)["r"] == "exp(0.1*v)"
    code, _, _ = run(["family", "second-kind", "--c1", "0", "--c2", "0"], capsys)
    assert code == 2
    # the generated spec is loadable by eval
    code, _, _ = run(["eval", "--patch", str(out), "--grid", "3x3"], capsys)
    assert code == 0


def test_verify_small_counts_deterministic(capsys):
    argv = ["verify", "all", "--seed", "3", "--count", "20"]
    code, a, err = run(argv, capsys)
    assert code == 0 and "FAIL" not in err
    _, b, _ = run(argv, capsys)
    assert a == b
    summary = json.loads(a)
    assert [s["name"] for s in summary["suites"]] == list(verify.SUITE_NAMES)


def test_verify_failure_exit_code(monkeypatch, capsys):
    def failing(name, seed=0, count=None):
        chk = verify.Check("always", 0.0)
        chk.add(1.0)
        return [verify.SuiteResult(name, [chk])]

    monkeypatch.setattr(verify, "run", failing)
    code, out, err = run(["verify", "lemma41"], capsys)
    assert code == 1 and "FAIL" in err and json.loads(out)["passed"] is False


def test_suite_seed_independent_of_grouping():
    alone = verify.run("canonical", seed=5, count=10)[0].as_dict()
    grouped = [r for r in verify.run("all", seed=5, count=10) if r.name == "canonical"][0]
    assert alone == grouped.as_dict()


def test_module_entry_point():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "wintgen", "family", "exponential",
                           "--c1", "1", "--c2", "0.1"], capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and '"exp(0.1*v)"' in proc.stdout
