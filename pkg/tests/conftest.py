import numpy as np
import pytest

from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.dual_construction import build


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def duals():
    """Built duals of the commutative fixtures, keyed by groupoid name, built once."""
    cache = {}

    def get(G):
        if G.name not in cache:
            cache[G.name] = build(G)
        return cache[G.name]
    return get


@pytest.fixture(scope="session")
def pair2_dual(duals):
    return duals(gp.pair(2))


@pytest.fixture(scope="session")
def z2_dual(duals):
    return duals(fx.z_group(2))


@pytest.fixture(scope="session")
def z3_dual(duals):
    return duals(fx.z_group(3))


@pytest.fixture(scope="session")
def s3_bundle():
    return fx.s3_quantum()


@pytest.fixture(scope="session")
def z2_bundle():
    return fx.z2_quantum()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
