import numpy as np
import pytest

from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.corepresentation import (BaseMismatch, GroupoidMismatch, GroupoidRep, character_rep,
                                        check_corep_axioms, corep_from_rep, equivalence_report,
                                        permutation_rep, quantum_corep_check, regular_corep, regular_rep,
                                        rep_validate, sign_rep, tensor_associativity, tensor_coreps,
                                        tensor_rep, trivial_rep)
from qgroupoid.hilbert_bimodule import hilbert_space
from qgroupoid.selftest import coset_action, subgroup

AXIOMS = ("cc1 inner product", "cc2 coassociativity", "module relation delta(u b) = delta(u) eta_s(b)", "counit")


def assert_corep(rep, tol=1e-10):
    assert rep.passed, rep.format()
    for name in AXIOMS:
        assert rep[name].residual < tol


def test_trivial_rep_pair2():
    assert rep_validate(trivial_rep(gp.pair(2))).passed


def test_sign_rep_z2():
    R = sign_rep(fx.z_group(2))
    assert rep_validate(R).passed
    assert R.U[1][0, 0] == -1


def test_sign_rep_on_z3_is_not_a_rep():
    rep = rep_validate(sign_rep(fx.z_group(3)))
    assert not rep["multiplicative"].passed


@pytest.mark.parametrize("order,dim", [(3, 2), (2, 3)])
def test_s3_coset_permutation_rep(order, dim):
    T = np.asarray(gp.s3_table())
    e = gp.check_group_table(T)
    g = next(k for k in range(6) if k != e and T[T[k, k], k] == e) if order == 3 else \
        next(k for k in range(6) if k != e and T[k, k] == e)
    perms = coset_action(T, subgroup(T, [g]))
    R = permutation_rep(fx.s3_group(), perms)
    assert R.dim == dim
    assert rep_validate(R).passed
    # all 36 products compose
    for a in range(6):
        for b in range(6):
            assert np.array_equal(R.U[T[a, b]], R.U[a] @ R.U[b])


def test_broken_rep_is_reported():
    G = fx.z_group(2)
    rep = rep_validate(GroupoidRep(G, [1], [np.eye(1), 2 * np.eye(1)]))
    assert not rep["unitary"].passed


def test_corep_trivial_on_trivial(duals):
    D = duals(gp.trivial())
    C = corep_from_rep(trivial_rep(D.groupoid), D)
    assert np.allclose(C.raw, [[[1]]])
    assert_corep(check_corep_axioms(C))


def test_trivial_corep_pair2_is_source_pullback(pair2_dual):
    G = pair2_dual.groupoid
    C = corep_from_rep(trivial_rep(G), pair2_dual)
    raw = np.einsum("xa,apj,ji->xpi", C.E.ambient, C.raw, np.linalg.inv(C.E.ambient))
    # (delta Psi)(x) = Psi(s(x)), landing in the fibre over t(x)
    want = np.zeros((2, 4, 2))
    for x in range(4):
        want[G.tgt[x], x, G.src[x]] = 1
    assert np.allclose(raw, want)
    assert_corep(check_corep_axioms(C))


def test_sign_corep_z2(z2_dual):
    C = corep_from_rep(sign_rep(z2_dual.groupoid), z2_dual)
    rep = check_corep_axioms(C)
    assert_corep(rep)
    assert rep["cc2 coassociativity"].residual == 0.0


@pytest.mark.parametrize("G", fx.groupoid_fixtures(), ids=lambda G: G.name)
@pytest.mark.parametrize("make", [trivial_rep, regular_rep], ids=["trivial", "regular"])
def test_rep_induced_coreps_on_fixtures(G, make, duals):
    D = duals(G)
    R = make(G)
    assert rep_validate(R).passed
    assert_corep(check_corep_axioms(corep_from_rep(R, D)))


def test_scaled_delta_breaks_cc1(z2_dual):
    C = corep_from_rep(trivial_rep(z2_dual.groupoid), z2_dual).scaled(2.0)
    rep = check_corep_axioms(C)
    assert rep["cc1 inner product"].residual == pytest.approx(3.0)


def test_twist_breaks_axioms(pair2_dual):
    C = corep_from_rep(regular_rep(pair2_dual.groupoid), pair2_dual)
    V = np.eye(C.E.dim)[::-1]
    rep = check_corep_axioms(C.twisted(V))
    assert not (rep["cc2 coassociativity"].passed and rep[AXIOMS[2]].passed)


def test_mismatched_groupoids(pair2_dual):
    with pytest.raises(GroupoidMismatch):
        corep_from_rep(trivial_rep(fx.z_group(2)), pair2_dual)


def test_tensor_trivial_trivial(pair2_dual):
    T = corep_from_rep(trivial_rep(pair2_dual.groupoid), pair2_dual)
    TT = tensor_coreps(T, T)
    assert_corep(check_corep_axioms(TT))
    assert equivalence_report(TT, T).passed


def test_sign_squared_is_trivial(z2_dual):
    G = z2_dual.groupoid
    s = corep_from_rep(sign_rep(G), z2_dual)
    t = corep_from_rep(trivial_rep(G), z2_dual)
    ss = tensor_coreps(s, s)
    assert_corep(check_corep_axioms(ss))
    assert equivalence_report(ss, t).passed
    assert not equivalence_report(s, t).passed
    assert equivalence_report(tensor_coreps(t, s), s).passed


def test_tensor_rep_matches_tensor_corep(z2_dual):
    s = sign_rep(z2_dual.groupoid)
    R = tensor_rep(s, s)
    assert rep_validate(R).passed
    assert np.allclose(R.U[1], [[1]])


@pytest.mark.parametrize("G", [gp.pair(2), fx.z_group(3), fx.action_z2()], ids=lambda G: G.name)
def test_tensor_associativity(G, duals):
    D = duals(G)
    C = corep_from_rep(regular_rep(G), D)
    T = corep_from_rep(trivial_rep(G), D)
    rep = tensor_associativity(C, T, C)
    assert rep.passed and rep.max_residual < 1e-10


def test_character_rep_z4():
    G = fx.z_group(4)
    R = character_rep(G, [1, 1j, -1, -1j])
    assert rep_validate(R).passed


def test_quantum_regular_corep_z2(z2_bundle):
    C = regular_corep(z2_bundle)
    rep = quantum_corep_check(C.E, C.raw, z2_bundle)
    assert rep.passed, rep.format()
    assert rep.max_residual < 1e-10


def test_quantum_regular_corep_s3(s3_bundle):
    C = regular_corep(s3_bundle)
    assert quantum_corep_check(C.E, C.raw, s3_bundle).passed


def test_quantum_check_agrees_with_commutative(pair2_dual):
    for make in (trivial_rep, regular_rep):
        C = corep_from_rep(make(pair2_dual.groupoid), pair2_dual)
        a = check_corep_axioms(C)
        b = quantum_corep_check(C.E, C.raw, pair2_dual.data)
        for name in AXIOMS[:3]:
            assert a[name].passed == b[name].passed
            assert abs(a[name].residual - b[name].residual) < 1e-12


def test_zero_delta_fails_cc1(z2_bundle):
    E = hilbert_space(np.eye(1))
    rep = quantum_corep_check(E, np.zeros((1, z2_bundle.A.dim, 1)), z2_bundle)
    assert not rep["cc1 inner product"].passed


def test_base_mismatch(pair2_dual):
    with pytest.raises(BaseMismatch):
        quantum_corep_check(hilbert_space(np.eye(1)), np.zeros((1, 4, 1)), pair2_dual.data)
