import numpy as np
import pytest

from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.dual_construction import (COUNIT_PACKAGE, HAAR_PACKAGE, NotGroupMode, build, check_counit,
                                         check_group_mode, check_iso_gamma2, package_passed, verify)
from qgroupoid.groupoid import InvalidGroupoid

FIXTURES = fx.groupoid_fixtures()
GROUPS = [fx.z_group(n) for n in range(1, 9)] + [fx.s3_group()]


def product_oracle(G):
    """Composition by arrow id straight from the serialized table."""
    return {(x, y): xy for x, y, xy in G.to_dict()["compose"]}


def delta_oracle(G):
    """Delta(d_z)(x, y) = [xy = z] on arrow ids."""
    n = G.n_arrows
    idx = {a: i for i, a in enumerate(G.arrows)}
    out = np.zeros((n, n, n))
    for (x, y), z in product_oracle(G).items():
        out[idx[z], idx[x], idx[y]] = 1.0
    return out


@pytest.mark.parametrize("G", FIXTURES, ids=lambda G: G.name)
def test_structure_maps_match_oracle(G, duals):
    D = duals(G)
    Q = D.data
    d = G.to_dict()
    idx = {a: i for i, a in enumerate(G.arrows)}
    obj = {q: i for i, q in enumerate(G.objects)}
    assert np.array_equal(Q.delta_tensor().real, delta_oracle(G))
    for a in d["arrows"]:
        x = idx[a["id"]]
        assert Q.eta_s.matrix[x, obj[a["src"]]] == 1 and Q.eta_s.matrix[x].sum() == 1
        assert Q.eta_t.matrix[x, obj[a["tgt"]]] == 1 and Q.eta_t.matrix[x].sum() == 1
    for x, y in d["inverses"].items():
        assert Q.S.matrix[idx[y], idx[x]] == 1
    for q, e in d["identities"].items():
        assert D.counit.matrix[obj[q], idx[e]] == 1


def test_trivial_dual():
    D = build(gp.trivial())
    Q = D.data
    assert Q.A.dim == Q.B.dim == 1
    for M in (Q.S.matrix, Q.P.matrix, Q.eta_s.matrix, Q.eta_t.matrix):
        assert np.array_equal(M, [[1]])
    assert np.array_equal(Q.delta_tensor(), [[[1]]])


def test_z2_dual_examples(z2_dual):
    Q = z2_dual.data
    e, g = Q.basis_names.index("0"), Q.basis_names.index("1")
    Dt = Q.delta_tensor().real
    want = np.zeros((2, 2))
    want[e, g] = want[g, e] = 1
    assert np.array_equal(Dt[g], want)
    assert np.array_equal(Q.S.matrix, np.eye(2))
    assert np.allclose(Q.P.matrix, [[0.5, 0.5]])


def test_pair2_dual_examples(pair2_dual):
    Q = pair2_dual.data
    i = Q.basis_names.index
    for a, b in [(1, 2), (2, 1), (1, 1)]:
        assert Q.S.matrix[i(f"({b},{a})"), i(f"({a},{b})")] == 1
        col = Q.P.matrix[:, i(f"({a},{b})")]
        want = np.zeros(2)
        want[a - 1] = 0.5
        assert np.array_equal(col, want)


@pytest.mark.parametrize("G,dim", [(gp.trivial(), 1), (gp.pair(2), 8), (fx.z_group(3), 9)])
def test_iso_gamma2_examples(G, dim, duals):
    rep = check_iso_gamma2(duals(G))
    assert rep.passed
    assert rep.info["generated_dim"] == dim


def test_counit_trivial():
    rep = check_counit(build(gp.trivial()))
    assert rep.passed and rep.max_residual == 0.0


def test_counit_z2_leg_sum(z2_dual):
    Q, eps = z2_dual.data, z2_dual.counit
    e, g = Q.basis_names.index("0"), Q.basis_names.index("1")
    assert eps.matrix[0, e] == 1 and eps.matrix[0, g] == 0
    legs = Q.delta_legs[g]
    total = sum(l[0] * eps(l[1])[0] for l in legs)
    assert np.array_equal(total, np.eye(2)[g])


def test_counit_pair2_keeps_identity_legs(pair2_dual):
    Q, eps = pair2_dual.data, pair2_dual.counit
    i = Q.basis_names.index
    legs = Q.delta_legs[i("(1,2)")]
    got = sorted((Q.basis_names[int(np.argmax(l[0].real))], Q.basis_names[int(np.argmax(l[1].real))]) for l in legs)
    assert got == [("(1,1)", "(1,2)"), ("(1,2)", "(2,2)")]
    kept = [l for l in legs if np.any(eps(l[1]))]
    assert len(kept) == 1 and Q.basis_names[int(np.argmax(kept[0][1].real))] == "(2,2)"


def test_group_mode_z2_orco(z2_dual):
    Q = z2_dual.data
    g = Q.basis_names.index("1")
    s = sum(Q.A.mult(l[0], Q.S(l[1])) for l in Q.delta_legs[g])
    assert np.array_equal(s, np.zeros(2))
    rep = check_group_mode(z2_dual)
    assert rep.passed


def test_group_mode_z3_haar_average(z3_dual):
    Q = z3_dual.data
    for p in range(3):
        lhs = sum(l[0] * Q.P(l[1])[0] for l in Q.delta_legs[p])
        assert np.allclose(lhs, np.full(3, 1 / 3))
    assert check_group_mode(z3_dual).passed


def test_group_mode_trivial():
    rep = check_group_mode(build(gp.trivial()))
    assert rep.passed and rep.max_residual == 0.0


def test_group_mode_needs_one_object(pair2_dual):
    with pytest.raises(NotGroupMode):
        check_group_mode(pair2_dual)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_both_packages_pass_on_groups(G, duals):
    rep = check_group_mode(duals(G))
    assert package_passed(rep, COUNIT_PACKAGE)
    assert package_passed(rep, HAAR_PACKAGE)
    assert rep.max_residual < 1e-10


@pytest.mark.parametrize("G", FIXTURES, ids=lambda G: G.name)
def test_verify_fixtures(G, duals):
    rep = verify(duals(G))
    assert rep.passed, rep.format()
    assert rep.max_residual < 1e-10
    assert rep.info["generated_dim"] == len(gp.composable_pairs(G))


def test_strict_build_rejects_broken_input():
    with pytest.raises(InvalidGroupoid):
        build(fx.corrupt_composition(gp.pair(3), "(1,2)", "(2,1)", "(1,2)"))
    with pytest.raises(Exception):
        build(gp.pair(2), haar=np.array([0.5, 0.3]))


def test_corrupted_pair3_fails_an_axiom():
    G = fx.corrupt_composition(gp.pair(3), "(1,2)", "(2,1)", "(1,2)")
    rep = verify(build(G, strict=False))
    axioms = [c for c in rep.failures() if c.name in ("coassociativity", "counit right", "counit left",
                                                       "Haar invariance")]
    assert axioms
    assert max(c.residual for c in axioms) > 0.1


@pytest.mark.parametrize("c", [1e-3, 1.0, 7.0, 1e3])
def test_haar_scaling_keeps_verdict(c):
    G = fx.action_z2()
    w = c * gp.haar_system(G).weights
    rep = verify(build(G, haar=w), checks=("haar",))
    assert rep.passed


def test_non_invariant_weights_fail_haar():
    rep = verify(build(gp.pair(2), haar=np.array([0.5, 0.3]), strict=False), checks=("groupoid", "haar"))
    assert not rep["Haar invariance"].passed
    assert rep["Haar invariance"].residual > 1e-2
