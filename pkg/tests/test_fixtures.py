import pytest

from qgroupoid import fixtures as fx
from qgroupoid.verify import CHECK_GROUPS, detected, verify_instance


@pytest.mark.parametrize("name", list(fx.FIXTURES))
def test_fixture_passes(name):
    rep = verify_instance(fx.get(name))
    assert rep.passed, rep.format()


@pytest.mark.parametrize("name", list(fx.MUTANTS))
def test_mutant_detected(name):
    rep = verify_instance(fx.get(name))
    assert not rep.passed
    assert detected(rep)
    worst = max(rep.failures(), key=lambda c: c.residual)
    assert worst.residual > 1e-2 and worst.witness is not None


def test_ten_mutants_with_clean_bases():
    assert len(fx.MUTANTS) == 10
    assert set(fx.MUTANT_BASES) == set(fx.MUTANTS)
    assert set(fx.MUTANT_BASES.values()) <= set(fx.FIXTURES)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fx.get("nope")


def test_check_filter():
    rep = verify_instance(fx.get("pair2"), checks=["groupoid"])
    assert rep.names() and all(n.startswith(("groupoid ", "Haar weights")) for n in rep.names())
    with pytest.raises(ValueError):
        verify_instance(fx.get("pair2"), checks=["nope"])


def test_every_kind_has_groups():
    assert set(CHECK_GROUPS) == {"groupoid", "quantum_bundle", "representation"}
