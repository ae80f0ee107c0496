"""Seeded property suite behind ``qgroupoid selftest``.

Each property draws its own random instance from a generator seeded by
``(seed, property index)``, so the results do not depend on the order or
concurrency of evaluation. ``fault`` makes a property run on deliberately
broken input; the harness must then report exactly that property as failing.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fixtures as fx
from . import groupoid as gp
from .corepresentation import (check_corep_axioms, corep_from_rep, equivalence_report, regular_rep,
                               sign_rep, tensor_associativity, tensor_coreps, trivial_rep)
from .cstar_algebra import CStarAlgebra, characters, gelfand_reconstruct
from .dual_construction import build, verify as verify_dual
from .hilbert_bimodule import canonical_over_self, hilbert_space, interior_tensor
from .matrix_kernel import DEFAULT_TOL
from .reports import Check, Report, make_check
from .verify import detected, verify_instance

GROUPS = ("z2", "z3", "z4", "z5", "z6", "s3")
MAX_ARROWS = 24


# -- random instances -------------------------------------------------------------------

def subgroup(T, gens):
    """Closure of ``gens`` under the group law ``T``."""
    T = np.asarray(T)
    e = gp.check_group_table(T)
    H = {e} | set(int(g) for g in gens)
    while True:
        new = {int(T[a, b]) for a in H for b in H} - H
        if not new:
            return sorted(H)
        H |= new


def coset_action(T, H):
    """Permutations of the left cosets ``gH`` under left multiplication."""
    T = np.asarray(T)
    n = len(T)
    cosets, seen = [], set()
    for g in range(n):
        c = frozenset(int(T[g, h]) for h in H)
        if c not in seen:
            seen.add(c)
            cosets.append(c)
    index = {c: i for i, c in enumerate(cosets)}
    return [[index[frozenset(int(T[g, x]) for x in c)] for c in cosets] for g in range(n)]


def random_action_groupoid(rng, max_arrows=MAX_ARROWS):
    """Action groupoid of a random small group on the cosets of one or two random subgroups.

    The first subgroup is redrawn until the groupoid has at most ``max_arrows``
    arrows; the second action is kept only if it fits.
    """
    name = GROUPS[rng.integers(len(GROUPS))]
    T, names = gp.named_table(name)
    n = len(T)
    perms = None
    while perms is None:
        H = subgroup(T, rng.choice(n, size=int(rng.integers(0, 2)), replace=False))
        P = np.asarray(coset_action(T, H))
        if n * P.shape[1] <= max_arrows:
            perms = P
    if rng.integers(2):
        H = subgroup(T, rng.choice(n, size=int(rng.integers(0, 2)), replace=False))
        P = np.asarray(coset_action(T, H))
        if n * (perms.shape[1] + P.shape[1]) <= max_arrows:
            perms = np.hstack([perms, P + perms.shape[1]])
    return gp.require_valid(gp.action(T, perms.tolist(), names, name=f"action({name},{perms.shape[1]})"))


def random_module_over_C(rng, m):
    X = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return hilbert_space(X.conj().T @ X + 0.1 * np.eye(m))


# -- properties ----------------------------------------------------------------------------
# each returns a Report whose pass flag is the property verdict

def prop_action_axioms(rng, fault, tol):
    G = random_action_groupoid(rng)
    if fault:
        x, y, _ = G.compose_ids()[0]
        G = fx.corrupt_composition(G, x, y, G.arrows[-1])
    rep = verify_dual(build(G, strict=False, tol=tol), tol)
    rep.info["instance"] = G.name
    return rep


def prop_action_coreps(rng, fault, tol):
    G = random_action_groupoid(rng)
    D = build(G, tol=tol)
    rep = Report(f"coreps of {G.name}", tol)
    for R in (trivial_rep(G), regular_rep(G)):
        C = corep_from_rep(R, D)
        rep.extend(check_corep_axioms(C.scaled(2.0) if fault else C, tol), f"{R.name} ")
    return rep


def prop_haar_scaling(rng, fault, tol):
    G = random_action_groupoid(rng)
    base = gp.haar_system(G).weights
    labels = G.orbits()
    c = rng.uniform(0.5, 2.0, size=labels.max() + 1)
    w = base * c[labels]
    if fault and G.n_objects > 1:
        w = w * np.linspace(1.0, 1.5, G.n_objects)
    elif fault:
        x, y, _ = G.compose_ids()[0]
        G = fx.corrupt_composition(G, x, y, G.arrows[-1])
    return verify_dual(build(G, haar=w, strict=False, tol=tol), tol, checks=("groupoid", "haar", "counit"))


def prop_rieffel_over_C(rng, fault, tol):
    rep = Report("interior tensor over C", tol)
    m1, m2 = (int(k) for k in rng.integers(1, 6, size=2))
    E1, E2 = random_module_over_C(rng, m1), random_module_over_C(rng, m2)
    T = interior_tensor(E1, E2, tol)
    rep.add(make_check("dimension", abs(T.dim - m1 * m2), 1.0, tol))
    G1 = E1.dense_gram()[:, :, 0]
    G2 = E2.dense_gram()[:, :, 0]
    U1 = E1.ambient
    U2 = E2.ambient
    # Gram of elementary tensors of the original bases
    raw = np.einsum("ia,jb->abij", np.linalg.inv(U1).T, np.linalg.inv(U2).T).reshape(m1, m2, -1)
    cls = T.quotient(np.einsum("ai,bj,ijk->abk", np.eye(m1), np.eye(m2), raw))
    got = T.inner(cls.T[:, None, :], cls.T[None, :, :])[:, :, 0]
    G1o = np.linalg.inv(U1).conj().T @ G1 @ np.linalg.inv(U1)
    G2o = np.linalg.inv(U2).conj().T @ G2 @ np.linalg.inv(U2)
    want = np.kron(G1o, G2o) * (1.1 if fault else 1.0)
    rep.add(make_check("gram = kron", float(np.abs(got - want).max()), float(np.abs(want).max()), tol))
    return rep


def prop_unit_law(rng, fault, tol):
    rep = Report("B (x)_B B = B", tol)
    B = CStarAlgebra([[1, 1], [1, 1, 1], [2]][int(rng.integers(3))], label="B")
    E = canonical_over_self(B)
    T = interior_tensor(E, E, tol)
    rep.add(make_check("dimension", abs(T.dim - B.dim) + (1 if fault else 0), 1.0, tol, witness=B.label))
    I = B.basis()
    ua = np.linalg.solve(E.ambient, B.unit())
    amb_i = np.linalg.solve(E.ambient, I.T).T
    cls = np.stack([T.elementary(v, ua) for v in amb_i])
    got = T.inner(cls[:, None], cls[None, :])
    want = B.mult(B.star(I)[:, None], I[None, :])
    rep.add(make_check("inner product", float(np.max(B.norm(got - want))), 1.0, tol))
    return rep


def prop_sign_squared(rng, fault, tol):
    G = fx.z_group(2)
    D = build(G, tol=tol)
    s = corep_from_rep(sign_rep(G), D)
    t = corep_from_rep(trivial_rep(G), D)
    return equivalence_report(tensor_coreps(s, s, tol), s if fault else t, tol)


def prop_tensor_associativity(rng, fault, tol):
    G = random_action_groupoid(rng)
    D = build(G, tol=tol)
    C = corep_from_rep(regular_rep(G), D)
    T = corep_from_rep(trivial_rep(G), D)
    rep = tensor_associativity(C, T, C, tol)
    if fault:
        rep.extend(check_corep_axioms(C.twisted(np.eye(C.E.dim)[::-1]), tol), "twisted ")
    return rep


def prop_gelfand(rng, fault, tol):
    rep = Report("Gelfand roundtrip", tol)
    n = int(rng.integers(1, 9))
    A = CStarAlgebra([1] * n)
    chars = characters(A)
    pts = [int(np.argmax(c.matrix[0])) for c in chars]
    if fault:
        pts = pts[::-1] if n > 1 else [1]
    rep.add(make_check("characters are the points", 0.0 if pts == list(range(n)) else 1.0, 1.0, tol))
    v = A.random_element(rng)
    rep.add(make_check("reconstruction", float(np.abs(gelfand_reconstruct(A, v) - v).max()),
                       float(np.abs(v).max()), tol))
    return rep


def prop_s3_bundle(rng, fault, tol):
    inst = fx.get("s3-quantum-antipode-id" if fault else "s3-quantum")
    return verify_instance(inst, tol)


def _mutant_property(name):
    def prop(rng, fault, tol):
        inst = fx.get(fx.MUTANT_BASES[name] if fault else name)
        rep = verify_instance(inst, tol)
        out = Report(f"mutant {name}", tol)
        out.add(make_check("detected", 0.0 if detected(rep) else 1.0, 1.0, tol,
                           witness=[c.name for c in rep.failures()][:3] or None))
        return out
    return prop


PROPERTIES = [
    ("random action groupoid axioms", prop_action_axioms),
    ("random action groupoid corepresentations", prop_action_coreps),
    ("orbit-wise Haar rescaling", prop_haar_scaling),
    ("interior tensor over C", prop_rieffel_over_C),
    ("B (x)_B B = B", prop_unit_law),
    ("sign x sign ~ trivial", prop_sign_squared),
    ("corepresentation tensor associativity", prop_tensor_associativity),
    ("Gelfand roundtrip", prop_gelfand),
    ("S3 group algebra bundle", prop_s3_bundle),
] + [(f"mutant {m} detected", _mutant_property(m)) for m in fx.MUTANTS]


def thread_count():
    try:
        return max(1, int(os.environ.get("QGROUPOID_THREADS", "1")))
    except ValueError:
        return 1


def selftest(seed=0, tol=DEFAULT_TOL, inject_fault=None, threads=None):
    """Run every property; one check per property, in a fixed order."""
    names = [n for n, _ in PROPERTIES]
    if inject_fault is not None and inject_fault not in names:
        raise KeyError(f"unknown property {inject_fault!r}")

    def run(k):
        name, fn = PROPERTIES[k]
        rng = np.random.default_rng([seed, k])
        sub = fn(rng, name == inject_fault, tol)
        worst = max(sub.checks, key=lambda c: (not c.passed, c.residual))
        return Check(name, worst.residual, sub.passed, 1.0, None if sub.passed else worst.name)

    workers = threads or thread_count()
    with ThreadPoolExecutor(max_workers=workers) as ex:
        checks = list(ex.map(run, range(len(PROPERTIES))))
    rep = Report(f"selftest seed {seed}", tol)
    for c in checks:
        rep.add(c)
    rep.info["seed"] = seed
    return rep
