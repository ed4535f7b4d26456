import json
import subprocess
import sys
from pathlib import Path

import pytest

from rigsyn.cli import main
from rigsyn.cochain import Complex
from rigsyn.fisoc import abs_rigid
from rigsyn.linalg import Matrix
from rigsyn.syntomic import builtin_example, elliptic_mult, syntomic_cone, syntomic_holim

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def table_rows(text):
    lines = text.strip().splitlines()
    return [line.split() for line in lines[3:]]


# compute ----------------------------------------------------------------

def test_compute_syntomic_text(capsys):
    code, out, _ = run(capsys, "compute", "syntomic", "--example", "elliptic-mult", "--twist", "1")
    assert code == 0
    rows = {int(r[0]): int(r[1]) for r in table_rows(out)}
    assert rows[1] == 2 and rows[2] == 2


def test_compute_matches_library(capsys):
    pkg = elliptic_mult()
    for subject, fn in (("syntomic", syntomic_cone), ("holim", syntomic_holim)):
        code, rep = run_json(capsys, "compute", subject, "--example", "elliptic-mult")
        assert code == 0
        degs = [int(n) for n in rep["dims"]]
        lib = fn(pkg, 1, degs)
        assert {int(n): v for n, v in rep["dims"].items()} == lib
        assert rep["schema_version"] == 1


def test_compute_abs_rigid(capsys):
    code, out, _ = run(capsys, "compute", "abs-rigid", "--example", "gm", "--twist", "1")
    assert code == 0
    rows = {int(r[0]): int(r[1]) for r in table_rows(out)}
    assert rows[1] == 1 and rows[2] == 1
    g = builtin_example("gm")
    assert all(rows[n] == abs_rigid(g, 1, n) for n in rows)


def test_compute_cohomology_acyclic_file(capsys, tmp_path):
    c = Complex({0: 1, 1: 1}, {0: Matrix.identity(1)})
    path = tmp_path / "acyclic.json"
    path.write_text(json.dumps(c.to_json()))
    code, rep = run_json(capsys, "compute", "cohomology", "--package", str(path))
    assert code == 0
    assert set(rep["dims"].values()) == {0}


def test_compute_cohomology_eigenvalues(capsys):
    code, rep = run_json(capsys, "compute", "cohomology", "--example", "nodal-cubic")
    assert code == 0
    assert rep["dims"] == {"0": 1, "1": 1, "2": 1}
    assert rep["eigenvalues"] == {"0": ["1"], "1": ["1"], "2": ["5"]}


def test_compute_package_file(capsys, tmp_path):
    path = tmp_path / "pkg.json"
    path.write_text(json.dumps(elliptic_mult().to_json()))
    code, rep = run_json(capsys, "compute", "syntomic", "--package", str(path))
    _, ref = run_json(capsys, "compute", "syntomic", "--example", "elliptic-mult")
    assert code == 0
    assert rep["dims"] == ref["dims"]


@pytest.mark.parametrize("argv", [
    ["compute", "syntomic"],
    ["compute", "syntomic", "--example", "gm"],
    ["compute", "syntomic", "--example", "elliptic-mult", "--twist", "3"],
    ["compute", "syntomic", "--example", "elliptic-mult", "--prime", "4"],
    ["compute", "syntomic", "--package", "/nonexistent.json"],
    ["verify", "ses", "--cases", "0"],
    ["verify", "ring-axioms", "--perturb", "bogus"],
    ["examples", "export", "bogus"],
    ["examples", "export"],
])
def test_bad_input_exits_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_bad_input_json_error(capsys):
    code, rep = run_json(capsys, "examples", "export", "bogus")
    assert code == 2
    assert rep["error"] == "UnknownExample"


def test_window_flagged(capsys):
    code, rep = run_json(capsys, "compute", "syntomic", "--example", "elliptic-mult")
    lo, hi = rep["window"]
    assert rep["outside_window"]
    assert all(not lo <= n <= hi for n in rep["outside_window"])


# verify -----------------------------------------------------------------

def test_verify_ses_small(capsys):
    code, rep = run_json(capsys, "verify", "ses", "--seed", "7", "--cases", "10")
    assert code == 0 and rep["passed"]


def test_verify_ring_axioms(capsys):
    code, out, _ = run(capsys, "verify", "ring-axioms", "--model", "derham-toy")
    assert code == 0
    code, out, _ = run(capsys, "verify", "ring-axioms", "--model", "derham-toy", "--perturb", "mu")
    assert code == 1
    assert "FAIL" in out and "counterexample" in out


def test_verify_deterministic(capsys):
    argv = ("verify", "cone-les", "--seed", "3", "--cases", "5", "--format", "json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


# examples ---------------------------------------------------------------

def test_examples_list(capsys):
    code, out, _ = run(capsys, "examples", "list")
    assert code == 0
    for name in ("gm", "p1", "elliptic-mult", "nodal-cubic"):
        assert name in out


@pytest.mark.parametrize("name", ["gm", "p1", "elliptic-mult", "nodal-cubic"])
def test_export_matches_golden(capsys, name):
    code, out, _ = run(capsys, "examples", "export", name)
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rigsyn", "examples", "export", "gm"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout == (GOLDEN / "gm.json").read_text()
