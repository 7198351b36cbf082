import io
import json
import subprocess
import sys

import pytest

from painleve4d import catalog
from painleve4d.cli import build_parser, main
from painleve4d.dsl import format_map


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_confine_first_pattern():
    code, out, _ = run("confine", "--map", "a2a2", "--seed", "q1=eps", "--window", "8")
    assert code == 0
    assert "confined(4)" in out


def test_confine_json_is_byte_identical():
    a = run("confine", "--map", "a5", "--seed", "q2=1/eps,p2=eps", "--json", "--rng-seed", "7")[1]
    b = run("confine", "--map", "a5", "--seed", "q2=1/eps,p2=eps", "--json", "--rng-seed", "7")[1]
    assert a == b
    doc = json.loads(a)
    assert doc["verdict"] == "cyclic(3)"
    assert [s["label"] for s in doc["steps"]] == [5, 3, 7, 5]


def test_confine_expect_mismatch_exit_4():
    assert run("confine", "--seed", "q1=eps", "--expect", "confined(3)")[0] == 4


def test_confine_all_patterns():
    code, out, _ = run("confine", "--case", "a2a2", "--all", "--jobs", "2")
    assert code == 0
    assert out.count("PASS") == 5


def test_degrees_cross_check():
    code, out, _ = run("degrees", "--case", "a5", "--iters", "8", "--cross-check", "3", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["cross_check"]["match"] == [True, True, True]
    assert len(doc["predicted"]) == 8


def test_weyl_relations():
    assert run("weyl", "--case", "a2a2", "--check-relations")[0] == 0


def test_weyl_random_words_reproducible():
    a = run("weyl", "--case", "a5", "--random-words", "4", "--rng-seed", "2", "--json")
    b = run("weyl", "--case", "a5", "--random-words", "4", "--rng-seed", "2", "--json")
    assert a == b and a[0] == 0


@pytest.mark.parametrize("case", ["a2a2", "a5"])
def test_lattice(case):
    code, out, _ = run("lattice", "--case", case, "--json")
    assert code == 0
    assert json.loads(out)["isometry"] is True


def test_invariants():
    code, out, _ = run("invariants", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["a2a2"]["invariance"] == "swapped"
    assert doc["a5"]["invariance"] == "fixed"


def test_lax_and_negative_control():
    assert run("lax")[0] == 0
    code, out, _ = run("lax", "--perturb", "--json")
    assert code == 0
    assert json.loads(out)["residual_zero"] is False


def test_flow_csv():
    code, out, _ = run("flow", "--case", "a2a2", "--format", "csv", "--t-end", "0.1", "--step", "0.01")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,q1,p1,q2,p2,I1,I2"
    assert len(lines) == 12


def test_flow_json_and_structure():
    code, out, _ = run("flow", "--case", "a5", "--json")
    assert code == 0
    assert max(json.loads(out)["drift"].values()) < 1e-8
    assert run("flow", "--structure")[0] == 0


def test_parse_round_trip(tmp_path):
    p = tmp_path / "m.map"
    p.write_text(format_map(catalog.get_map("a5")))
    assert run("parse", str(p), "--compare", "a5")[0] == 0
    assert run("parse", str(p), "--compare", "a5.inverse")[0] == 4


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.map"
    bad.write_text("map m { vars: q1, p1, q2, p2; q1' = q1 +; }")
    assert run("parse", str(bad))[0] == 2
    undeclared = tmp_path / "u.map"
    undeclared.write_text("map m { vars: q1, p1, q2, p2; q1' = c; }")
    assert run("parse", str(undeclared))[0] == 3
    assert run("confine", "--seed", "q9=eps")[0] == 3
    assert run("confine", "--map", "nope", "--seed", "q1=eps")[0] == 3
    assert run("bogus")[0] == 2
    assert run("parse", str(tmp_path / "missing.map"))[0] == 3


def test_jobs_environment(monkeypatch):
    monkeypatch.setenv("PAINLEVE4D_JOBS", "zero")
    assert run("lax")[0] == 3
    monkeypatch.setenv("PAINLEVE4D_JOBS", "2")
    assert run("confine", "--case", "a5", "--all")[0] == 0


def test_every_subcommand_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == {"confine", "degrees", "lattice", "weyl", "invariants", "lax", "flow", "parse"}
    for name, sp in sub.choices.items():
        assert sp.description and len(sp.description) > 30, name


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "painleve4d", "lax"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "residual is zero: True" in r.stdout


@pytest.mark.slow
def test_degrees_full_cross_check():
    code, out, _ = run("degrees", "--case", "a5", "--iters", "8", "--cross-check", "5")
    assert code == 0
    assert "n=1..5: match" in out
