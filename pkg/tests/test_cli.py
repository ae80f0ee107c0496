import json
import os
import subprocess
import sys

import pytest

from qgroupoid.cli import main
from qgroupoid.serialization import load


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def gen(tmp_path):
    def make(*argv, name="inst.json"):
        out = tmp_path / name
        assert run("generate", *argv, "--out", out) == 0
        return out
    return make


def test_generate_pair(gen):
    inst = load(gen("pair", "--n", 2))
    assert inst.kind == "groupoid"
    assert inst.payload["groupoid"].n_arrows == 4


def test_generate_group_s3(gen):
    G = load(gen("group", "--table", "s3")).payload["groupoid"]
    assert (G.n_objects, G.n_arrows) == (1, 6)


def test_generate_quantum_s3(gen):
    Q = load(gen("quantum", "--group", "s3")).payload["bundle"]
    assert Q.A.dim == 6 and Q.B.dim == 1
    assert sorted(Q.A.block_sizes) == [1, 1, 2]


def test_generate_action_and_rep(gen, tmp_path):
    g = gen("action", "--table", "z2", "--perms", "[[0,1],[1,0]]", name="a.json")
    assert load(g).payload["groupoid"].n_arrows == 4
    r = gen("rep", "--groupoid", g, "--rep", "regular", name="r.json")
    assert load(r).kind == "representation"
    assert run("verify", r) == 0


def test_generate_to_stdout(capsys):
    assert run("generate", "trivial") == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "groupoid"


@pytest.mark.parametrize("argv", [("pair",), ("pair", "--n", "0"), ("fixture", "--name", "nope"),
                                  ("group", "--table", "q8"), ("action", "--table", "z2", "--perms", "[[0,1]]"),
                                  ("action", "--table", "z2", "--perms", "oops")])
def test_generate_bad_params(argv, capsys):
    assert run("generate", *argv) == 2
    assert "error" in capsys.readouterr().err


def test_verify_pair2(gen, capsys):
    assert run("verify", gen("pair", "--n", 2)) == 0
    assert "summary: PASS" in capsys.readouterr().out


def test_verify_corrupted_pair3(gen, tmp_path, capsys):
    path = gen("fixture", "--name", "pair3-corrupted")
    out = tmp_path / "report.json"
    assert run("verify", path, "--json", out) == 1
    assert "FAIL" in capsys.readouterr().out
    rep = json.loads(out.read_text())
    assert rep["summary"]["pass"] is False
    failed = [c for c in rep["checks"] if not c["pass"]]
    assert any(c["name"] == "groupoid associativity" and c["witness"] for c in failed)
    assert rep["instance"] == {"kind": "groupoid", "name": "pair(3)-corrupted"}


def test_verify_s3_quantum(gen):
    assert run("verify", gen("quantum", "--group", "s3")) == 0


def test_report_contract(gen, tmp_path):
    out = tmp_path / "r.json"
    run("verify", gen("fixture", "--name", "z2-scaled-delta"), "--json", out, "--tol", "1e-8")
    rep = json.loads(out.read_text())
    assert rep["tolerance"] == 1e-8
    assert rep["summary"]["pass"] == all(c["pass"] for c in rep["checks"])
    for c in rep["checks"]:
        assert set(c) >= {"name", "max_residual", "scale", "pass", "witness"}
        assert c["max_residual"] >= 0 and c["max_residual"] == c["max_residual"]


def test_verify_reports_interpretation_notes(gen, tmp_path):
    out = tmp_path / "r.json"
    assert run("verify", gen("fixture", "--name", "z2-quantum"), "--json", out) == 0
    assert any("eta_t o P" in n for n in json.loads(out.read_text())["notes"])


def test_verify_check_filter(gen, capsys):
    path = gen("fixture", "--name", "pair2-bad-haar")
    assert run("verify", path, "--checks", "haar") == 1
    assert run("verify", path, "--checks", "coassociativity") == 0
    assert run("verify", path, "--checks", "bogus") == 2


def test_verify_input_errors(tmp_path):
    assert run("verify", tmp_path / "missing.json") == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "kind": "groupoid", "payload": {}, "extra": 0}')
    assert run("verify", bad) == 2
    bad.write_text("not json")
    assert run("verify", bad) == 2


def test_module_entry_point(tmp_path):
    env = dict(os.environ, QGROUPOID_THREADS="2")
    res = subprocess.run([sys.executable, "-m", "qgroupoid", "generate", "pair", "--n", "2"],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert json.loads(res.stdout)["payload"]["objects"] == ["1", "2"]
