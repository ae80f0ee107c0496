import json
import subprocess
import sys

import numpy as np
import pytest

from qgroupoid import groupoid as gp
from qgroupoid.selftest import MAX_ARROWS, PROPERTIES, coset_action, random_action_groupoid, selftest, subgroup, thread_count


@pytest.fixture(scope="module")
def seed1():
    return selftest(1)


def test_seed1_all_pass(seed1):
    assert seed1.passed, seed1.format()
    assert seed1.names() == [n for n, _ in PROPERTIES]
    assert all(c.witness is None for c in seed1.checks)


def test_seed2_passes_with_other_instances():
    rep = selftest(2)
    assert rep.passed, rep.format()
    # the random instances differ between seeds
    draws = [random_action_groupoid(np.random.default_rng([s, 0])).to_dict() for s in (1, 2)]
    assert draws[0] != draws[1]


@pytest.mark.parametrize("seed", range(20))
def test_random_instances_stay_small(seed):
    G = random_action_groupoid(np.random.default_rng(seed))
    assert G.n_arrows <= MAX_ARROWS


def test_thread_count_does_not_change_report(seed1):
    a = json.dumps(seed1.to_dict(), sort_keys=True)
    b = json.dumps(selftest(1, threads=4).to_dict(), sort_keys=True)
    assert a == b


@pytest.mark.parametrize("name", ["random action groupoid axioms", "interior tensor over C",
                                  "sign x sign ~ trivial", "mutant pair2-dropped-leg detected",
                                  "orbit-wise Haar rescaling"])
def test_injected_fault_names_exact_property(name):
    rep = selftest(3, inject_fault=name)
    assert [c.name for c in rep.failures()] == [name]
    assert rep.failures()[0].witness is not None


def test_unknown_fault():
    with pytest.raises(KeyError):
        selftest(0, inject_fault="nope")


def test_thread_env(monkeypatch):
    monkeypatch.setenv("QGROUPOID_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("QGROUPOID_THREADS", "junk")
    assert thread_count() == 1


def test_subgroup_and_cosets():
    T, _ = gp.named_table("z6")
    assert subgroup(T, [2]) == [0, 2, 4]
    perms = coset_action(T, [0, 3])
    assert len(perms[0]) == 3
    assert gp.validate(gp.action(T, perms)).passed


def test_cli_selftest_bytes_identical(tmp_path):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"s{threads}.json"
        res = subprocess.run([sys.executable, "-m", "qgroupoid", "selftest", "--seed", "5", "--json", str(out)],
                             capture_output=True, text=True, env={"QGROUPOID_THREADS": threads, "PATH": ""})
        assert res.returncode == 0, res.stdout + res.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
