import numpy as np
import pytest

from qgroupoid import fixtures as fx
from qgroupoid import groupoid as gp
from qgroupoid.quantum_groupoid import (build_fiber_tensor, check_coassociativity, check_coinverse, check_haar,
                                        generated_algebra, group_algebra_bundle, validate_data, verify_all,
                                        wedderburn)


def group_basis(Q):
    """Group elements as coefficient vectors of A, rows indexed by group element."""
    return Q.group_images


@pytest.mark.parametrize("name", ["z2", "z3", "z4", "s3"])
def test_wedderburn_is_an_algebra_isomorphism(name):
    T, names = gp.named_table(name)
    Q = group_algebra_bundle(T, names)
    F = group_basis(Q)
    A = Q.A
    n = len(T)
    assert sum(k * k for k in A.block_sizes) == n
    for g in range(n):
        for h in range(n):
            assert np.allclose(A.mult(F[g], F[h]), F[T[g][h]], atol=1e-12)
    e = gp.check_group_table(T)
    assert np.allclose(F[e], A.unit())
    # unitary group elements: g* = g^-1
    inv = [int(np.flatnonzero(np.asarray(T)[g] == e)[0]) for g in range(n)]
    assert np.allclose(A.star(F), F[inv], atol=1e-12)


def test_wedderburn_s3_blocks():
    sizes, _ = wedderburn(gp.s3_table())
    assert sorted(sizes) == [1, 1, 2]


@pytest.mark.parametrize("which", ["z2_bundle", "s3_bundle"])
def test_group_algebra_structure_oracle(which, request):
    Q = request.getfixturevalue(which)
    F = group_basis(Q)
    n = len(F)
    names = Q.group_names
    T = gp.named_table("z2" if n == 2 else "s3")[0]
    e = gp.check_group_table(T)
    Dt = Q.delta_tensor()
    for g in range(n):
        # Delta(g) = g (x) g, S(g) = g^-1, P(g) = [g = e]
        assert np.allclose(np.tensordot(F[g], Dt, axes=(0, 0)), np.outer(F[g], F[g]), atol=1e-12), names[g]
        ginv = int(np.flatnonzero(np.asarray(T)[g] == e)[0])
        assert np.allclose(Q.S(F[g]), F[ginv], atol=1e-12)
        assert Q.P(F[g])[0] == pytest.approx(1.0 if g == e else 0.0, abs=1e-12)
    assert np.allclose(Q.eta_s.matrix[:, 0], Q.A.unit())
    assert np.allclose(Q.eta_t.matrix[:, 0], Q.A.unit())


def test_validate_z2_bundle(z2_bundle):
    rep = validate_data(z2_bundle)
    assert rep.passed, rep.format()


def test_antipode_identity_breaks_antihom():
    Q = fx.s3_quantum(antipode="identity")
    rep = validate_data(Q)
    c = rep["S anti-multiplicative"]
    assert not c.passed and c.witness is not None
    # the failure is real: two transpositions that do not commute
    T = np.asarray(gp.s3_table())
    F = group_basis(Q)
    g, h = [k for k in range(6) if k != 0 and T[k, k] == 0][:2]
    S = Q.S
    assert not np.allclose(S(Q.A.mult(F[g], F[h])), Q.A.mult(S(F[h]), S(F[g])))


@pytest.mark.parametrize("G", fx.groupoid_fixtures()[:6], ids=lambda G: G.name)
def test_validate_dual_bundles(G, duals):
    assert validate_data(duals(G).data).passed


@pytest.mark.parametrize("which,dim", [("z2_bundle", 4), ("s3_bundle", 36)])
def test_fiber_tensor_dimension(which, dim, request):
    F = build_fiber_tensor(request.getfixturevalue(which))
    assert F.module.dim == dim
    assert generated_algebra(F).dim == dim


def test_fiber_tensor_pair2(pair2_dual):
    F = pair2_dual.fiber_tensor()
    assert F.module.dim == 8
    gen = generated_algebra(F)
    assert gen.dim == 8
    assert gen.word_length <= 2


def test_generated_trivial(duals):
    assert generated_algebra(duals(gp.trivial()).fiber_tensor()).dim == 1


def test_coassociativity_z2_grouplike(z2_bundle):
    F = build_fiber_tensor(z2_bundle)
    rep = check_coassociativity(z2_bundle, F)
    assert rep.passed and rep.max_residual < 1e-12


def test_coassociativity_z3_dual(z3_dual):
    rep = check_coassociativity(z3_dual.data, z3_dual.fiber_tensor())
    assert rep.passed and rep.max_residual < 1e-12


def test_dropped_leg_breaks_coassociativity():
    Q = fx.get("pair2-dropped-leg").payload["bundle"]
    rep = check_coassociativity(Q, build_fiber_tensor(Q))
    assert rep["coassociativity"].residual > 0.1


def test_haar_z2_group_algebra(z2_bundle):
    Q = z2_bundle
    g = group_basis(Q)[1]
    # C_P(g (x) g) = g h(g) = 0
    assert Q.P(g)[0] == pytest.approx(0.0, abs=1e-14)
    assert check_haar(Q, build_fiber_tensor(Q)).passed


def test_haar_z2_dual(z2_dual):
    Q = z2_dual.data
    g = Q.basis_names.index("1")
    contraction = sum(l[0] * Q.P(l[1])[0] for l in Q.delta_legs[g])
    assert np.allclose(contraction, Q.eta_t(np.array([0.5])))
    assert check_haar(Q, z2_dual.fiber_tensor()).passed


def test_haar_trivial(duals):
    D = duals(gp.trivial())
    rep = check_haar(D.data, D.fiber_tensor())
    assert rep.passed and rep.max_residual == 0.0


def test_coinverse_pair2_example(pair2_dual):
    Q = pair2_dual.data
    i = Q.basis_names.index
    Dt = Q.delta_tensor().real
    S = Q.S.matrix.real
    flipped = np.einsum("xy,ux,vy->vu", Dt[i("(1,2)")], S, S)
    assert np.array_equal(flipped, Dt[i("(2,1)")])
    assert check_coinverse(Q, pair2_dual.fiber_tensor()).passed


def test_coinverse_s3_transposition(s3_bundle):
    F = group_basis(s3_bundle)
    T = np.asarray(gp.s3_table())
    t = next(k for k in range(1, 6) if T[k, k] == 0)
    assert np.allclose(s3_bundle.S(F[t]), F[t])
    assert check_coinverse(s3_bundle, build_fiber_tensor(s3_bundle)).passed


@pytest.mark.parametrize("name", ["pair2-dual", "z2-quantum", "s3-quantum"])
def test_verify_all_builtin_bundles(name):
    rep = verify_all(fx.get(name).payload["bundle"])
    assert rep.passed, rep.format()
    assert rep.max_residual < 1e-10


def test_left_coproduct_mutant():
    rep = verify_all(fx.get("s3-quantum-left-coproduct").payload["bundle"])
    assert rep["coassociativity"].passed
    assert rep["Delta multiplicative"].passed
    assert not rep["Haar invariance"].passed
    # (id (x) P)(g (x) e) = g, not h(g) 1
    assert rep["Haar invariance"].residual > 0.1


def test_trivial_bundle(duals):
    rep = verify_all(duals(gp.trivial()).data)
    assert rep.passed and rep.max_residual == 0.0


def test_verify_all_check_filter(z2_bundle):
    rep = verify_all(z2_bundle, checks=("haar",))
    assert rep.names() == ["Haar invariance", "Haar contraction balanced"]


def test_interpretation_notes_reported(z2_bundle):
    rep = verify_all(z2_bundle, checks=("haar",))
    assert any("eta_t o P" in n for n in rep.notes)
