"""Dual data of a finite groupoid.

``A = C(G1)`` (functions on arrows) and ``B = C(G0)`` (functions on objects)
are diagonal algebras whose bases are point indicators. Source and target
pull back to ``eta_s``, ``eta_t``; the counit is pullback along the identity
section, the antipode is pullback along inversion, the Haar map integrates
over target fibres and the coproduct dualizes composition:
``Delta(delta_z) = sum_{xy = z} delta_x (x) delta_y``.
"""

from dataclasses import dataclass, field

import numpy as np

from .blockops import BlockOp
from .cstar_algebra import CStarAlgebra, LinearMap, verify_kind
from .groupoid import (FiniteGroupoid, HaarSystem, InvalidGroupoid, composable_pairs, haar_system,
                       validate)
from .hilbert_bimodule import adjointness_defect
from .matrix_kernel import DEFAULT_TOL
from .quantum_groupoid import QuantumGroupoidData, build_fiber_tensor, generated_algebra, verify_all
from .reports import Report, failed_check, make_check


class NotGroupMode(ValueError):
    pass


@dataclass
class GroupoidDual:
    groupoid: FiniteGroupoid
    data: QuantumGroupoidData
    counit: LinearMap
    haar: HaarSystem
    gamma2: list                 # composable index pairs (x, y)
    gamma2_product: np.ndarray   # xy for each pair, or -1 if the table has no entry
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def group_mode(self):
        return self.groupoid.n_objects == 1

    def fiber_tensor(self, tol=DEFAULT_TOL):
        if "fiber" not in self.cache:
            self.cache["fiber"] = build_fiber_tensor(self.data, tol)
        return self.cache["fiber"]


def build(G, haar=None, strict=True, tol=DEFAULT_TOL):
    """Dual package of ``G``.

    With ``strict=False`` invalid groupoids and non-invariant weights are
    accepted, so that the verifier can report what breaks.
    """
    if strict:
        rep = validate(G, tol)
        if not rep.passed:
            c = rep.failures()[0]
            raise InvalidGroupoid(f"{G.name}: axiom {c.name} fails, witness {c.witness}")
    if haar is None:
        haar = haar_system(G, strict=strict, tol=tol)
    elif not isinstance(haar, HaarSystem):
        haar = haar_system(G, weights=haar, strict=strict, tol=tol)
    if strict and not haar.invariance.passed:
        raise InvalidGroupoid(f"{G.name}: Haar weights are not left-invariant")
    n, m = G.n_arrows, G.n_objects
    A = CStarAlgebra([1] * n, label=f"C({G.name}_1)")
    B = CStarAlgebra([1] * m, label=f"C({G.name}_0)")
    arr = np.arange(n)
    es = np.zeros((n, m))
    es[arr, G.src] = 1.0
    et = np.zeros((n, m))
    et[arr, G.tgt] = 1.0
    eps = np.zeros((m, n))
    eps[np.arange(m), G.ident] = 1.0
    S = np.zeros((n, n))
    S[G.inv, arr] = 1.0
    P = np.zeros((m, n))
    P[G.tgt, arr] = haar.weights[G.tgt]
    pairs = composable_pairs(G)
    prod = np.array([G.table[x, y] for x, y in pairs], dtype=int).reshape(-1)
    I = np.eye(n)
    legs = [[] for _ in range(n)]
    for (x, y), z in zip(pairs, prod):
        if z >= 0:
            legs[z].append((I[x], I[y]))
    Q = QuantumGroupoidData(A, B, LinearMap(B, A, es, "hom", "eta_s"), LinearMap(B, A, et, "antihom", "eta_t"),
                            LinearMap(A, B, P, "plain", "P"), LinearMap(A, A, S, "antihom", "S"), legs,
                            name=f"C({G.name})", basis_names=list(G.arrows))
    counit = LinearMap(A, B, eps, "hom", "epsilon")
    return GroupoidDual(G, Q, counit, haar, pairs, prod)


# -- commutative checks -------------------------------------------------------------

def _sup(X):
    """Sup norm of functions given as coefficient arrays (last axis or axes)."""
    return np.abs(X)


def _fn_check(name, X, Y, tol, witness_of):
    """Compare batches of functions ``X[k, ...]``, ``Y[k, ...]`` in sup norm."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    d = _sup(X - Y).reshape(len(X), -1).max(axis=1) if X.size else np.zeros(0)
    scale = max(float(_sup(X).max(initial=0.0)), float(_sup(Y).max(initial=0.0)))
    k = int(np.argmax(d)) if d.size else 0
    return make_check(name, float(d.max(initial=0.0)), scale, tol, witness=witness_of(k))


def check_iso_gamma2(D, tol=DEFAULT_TOL):
    """``A (x)_B A = C(G2)``: dimension count and the product projections."""
    G, Q = D.groupoid, D.data
    rep = Report(f"fiber product: {G.name}", tol)
    F = D.fiber_tensor(tol)
    M = F.module
    gen = generated_algebra(F, tol)
    n2 = len(D.gamma2)
    rep.info["generated_dim"] = gen.dim
    rep.info["gamma2"] = n2
    rep.add(make_check("dim A(x)_B A = |G2|", abs(gen.dim - n2), 1.0, tol,
                       witness=(gen.dim, n2), note=f"generated {gen.dim}, |G2| {n2}"))
    n = G.n_arrows
    prods = F.phi1[:, None] @ F.phi2[None, :]               # (x, y)
    comp = G.src[:, None] == G.tgt[None, :]
    wit = lambda k: (G.arrows[k // n], G.arrows[k % n])
    zero = BlockOp.zeros(M.layout, (n, n))
    dead = M.op_norm(prods - zero)
    dead = np.where(comp, 0.0, dead).reshape(-1)
    k = int(np.argmax(dead))
    rep.add(make_check("non-composable products vanish", float(dead[k]), 1.0, tol, witness=wit(k)))
    xs = np.array([p[0] for p in D.gamma2], dtype=int)
    ys = np.array([p[1] for p in D.gamma2], dtype=int)
    Pj = prods[xs, ys]                                      # (n2,)
    d, sc, k = adjointness_defect(M, Pj, Pj)
    rep.add(make_check("product projections self-adjoint", d, sc, tol, witness=wit(xs[k] * n + ys[k])))
    # P_i P_j = delta_ij P_i, in chunks to bound memory
    worst, wk = 0.0, 0
    step = max(1, 4096 // max(1, n2))
    eye = np.eye(n2)
    for a in range(0, n2, step):
        blk = Pj[a:a + step][:, None] @ Pj[None, :]
        want = Pj[a:a + step][:, None].scale(eye[a:a + step]).broadcast_to(blk.batch)
        r = M.op_norm(blk - want).reshape(-1)
        i = int(np.argmax(r))
        if r[i] > worst:
            worst, wk = float(r[i]), a * n2 + i
    i, j = divmod(wk, n2)
    rep.add(make_check("product projections orthogonal idempotents", worst, 1.0, tol,
                       witness=(wit(xs[i] * n + ys[i]), wit(xs[j] * n + ys[j]))))
    total = Pj.sum(axis=0)
    d = float(M.op_norm((total - BlockOp.identity(M.layout))[None]).max())
    rep.add(make_check("product projections sum to 1", d, 1.0, tol))
    return rep


def check_counit(D, tol=DEFAULT_TOL):
    """Counit laws in leg form and the bimodule property of the counit."""
    G, Q = D.groupoid, D.data
    A, B = Q.A, Q.B
    eps = D.counit
    rep = Report(f"counit: {G.name}", tol)
    legs = Q.legs_padded()
    l1, l2 = legs[:, :, 0], legs[:, :, 1]
    E = A.basis()
    right = A.mult(l1, Q.eta_s(eps(l2))).sum(axis=1)
    left = A.mult(Q.eta_t(eps(l1)), l2).sum(axis=1)
    rep.add(_fn_check("counit right (id (x) eps) Delta = id", right, E, tol, Q.name_of))
    rep.add(_fn_check("counit left (eps (x) id) Delta = id", left, E, tol, Q.name_of))
    Eb = B.basis()
    # eps(eta_t(b) a eta_s(c)) = b eps(a) c
    lhs = eps(A.mult(A.mult(Q.eta_t(Eb)[:, None, None], E[None, :, None]), Q.eta_s(Eb)[None, None, :]))
    rhs = B.mult(B.mult(Eb[:, None, None], eps(E)[None, :, None]), Eb[None, None, :])
    nb, na = B.dim, A.dim
    rep.add(_fn_check("counit bimodule morphism", lhs.reshape(-1, nb), rhs.reshape(-1, nb), tol,
                      lambda k: (G.objects[k // (na * nb)], G.arrows[(k // nb) % na], G.objects[k % nb])))
    rep.extend(verify_kind(eps, tol, kind="hom"), "counit ")
    return rep


def check_group_mode(D, tol=DEFAULT_TOL):
    """Hopf algebra identities of a group's function algebra, on the basis.

    The counit package is ``orco``, ``Seta`` and ``A21``; the Haar package is
    ``ginv`` and ``toberep``.
    """
    G, Q = D.groupoid, D.data
    if not D.group_mode:
        raise NotGroupMode(f"{G.name} has {G.n_objects} objects")
    A = Q.A
    eps, S, P = D.counit, Q.S, Q.P
    rep = Report(f"group mode: {G.name}", tol)
    E = A.basis()
    one = A.unit()
    legs = Q.legs_padded()
    l1, l2 = legs[:, :, 0], legs[:, :, 1]
    Dt = Q.delta_tensor()                                     # (p, x, y)
    eps1 = eps(E)[:, 0][:, None] * one[None]
    rep.add(_fn_check("orco: sum a' S(a'') = eps(a) 1", A.mult(l1, S(l2)).sum(axis=1), eps1, tol, Q.name_of))
    rep.add(_fn_check("orco: sum S(a') a'' = eps(a) 1", A.mult(S(l1), l2).sum(axis=1), eps1, tol, Q.name_of))
    rep.add(_fn_check("Seta: S(1) = 1", S(one)[None], one[None], tol, lambda k: "1"))
    lhs = np.einsum("pxy,xuv->puvy", Dt, Dt)
    rhs = np.einsum("pxy,yuv->pxuv", Dt, Dt)
    rep.add(_fn_check("A21: (Delta (x) id) Delta = (id (x) Delta) Delta", lhs, rhs, tol, Q.name_of))
    Sm = S.matrix
    flipped = np.einsum("pxy,ux,vy->pvu", Dt, Sm, Sm)
    rep.add(_fn_check("ginv: flip (S (x) S) Delta = Delta S", flipped, np.einsum("qp,qxy->pxy", Sm, Dt), tol,
                      Q.name_of))
    haar1 = P(E)[:, 0][:, None] * one[None]
    rep.add(_fn_check("toberep: (id (x) P) Delta = P", np.einsum("pxy,y->px", Dt, P.matrix[0]), haar1, tol,
                      Q.name_of))
    rep.add(_fn_check("toberep: (P (x) id) Delta = P", np.einsum("pxy,x->py", Dt, P.matrix[0]), haar1, tol,
                      Q.name_of))
    rep.add(_fn_check("antipode: (S o *)^2 = id", Q.antipode_star(Q.antipode_star(E)), E, tol, Q.name_of))
    return rep


COUNIT_PACKAGE = ("orco", "Seta", "A21")
HAAR_PACKAGE = ("ginv", "toberep")


def package_passed(rep, package):
    """Did every check of a group-mode package pass?"""
    sel = [c for c in rep.checks if c.name.split(":")[0] in package]
    return bool(sel) and all(c.passed for c in sel)


def verify(D, tol=DEFAULT_TOL, checks=None):
    """Groupoid axioms, Haar invariance, the quantum axiom suite with counit,
    the fiber-product isomorphism, the counit laws and (for groups) group mode."""
    want = lambda k: checks is None or k in checks
    G = D.groupoid
    rep = Report(f"groupoid dual: {G.name}", tol)
    if want("groupoid"):
        rep.extend(validate(G, tol), "groupoid ")
        rep.extend(D.haar.invariance, "Haar weights ")
    sub = verify_all(D.data, tol, counit=D.counit, checks=checks)
    rep.extend(sub)
    if any(c.name == "fiber tensor" and not c.passed for c in sub.checks):
        return rep
    rep.info["eta_t is a homomorphism"] = verify_kind(D.data.eta_t, tol, kind="hom").passed
    if want("iso"):
        try:
            rep.extend(check_iso_gamma2(D, tol))
        except RuntimeError as exc:
            rep.add(failed_check("fiber product", str(exc)))
    if want("counit"):
        rep.extend(check_counit(D, tol))
    if want("group") and D.group_mode:
        rep.extend(check_group_mode(D, tol))
    return rep
