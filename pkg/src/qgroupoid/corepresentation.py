"""Groupoid representations and corepresentations on Hilbert bimodules.

A corepresentation of a bundle ``(A, B, ...)`` on a Hilbert ``B``-bimodule
``E`` is a linear map ``delta: E -> E (x)_B A``. The codomain uses ``A`` as a
``B``-``A`` bimodule: ``b . a = a eta_t(b)``, right multiplication by ``A`` and
``<a, c>_A = a^* c``.

``delta`` is stored as a raw tensor ``raw[a, p, i]``: ``delta(e_i) = sum
raw[a, p, i] e_a (x) e_p`` with ``e_a`` the sector basis of ``E`` and ``e_p``
the standard basis of ``A``. Axioms are compared after dividing out the
balancing relations, so any raw representative is acceptable.
"""

from dataclasses import dataclass, field

import numpy as np

from .cstar_algebra import CStarAlgebra
from .dual_construction import GroupoidDual
from .groupoid import FiniteGroupoid, composable_pairs
from .hilbert_bimodule import FormNotPSD, HilbertBimodule, associator, interior_tensor, localization
from .matrix_kernel import DEFAULT_TOL
from .reports import Report, make_check


class GroupoidMismatch(ValueError):
    pass


class BaseMismatch(ValueError):
    pass


class CodomainFormNotPSD(ValueError):
    pass


# -- unitary representations ----------------------------------------------------------

@dataclass
class GroupoidRep:
    """Hilbert spaces ``H_q`` on objects and unitaries ``U(x): H_s(x) -> H_t(x)``."""
    groupoid: FiniteGroupoid
    fiber_dims: np.ndarray
    U: list
    name: str = "rep"

    def __post_init__(self):
        self.fiber_dims = np.asarray(self.fiber_dims, dtype=int)
        self.U = [np.asarray(u, dtype=complex) for u in self.U]

    @property
    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.fiber_dims)]).astype(int)

    @property
    def dim(self):
        return int(self.fiber_dims.sum())


def rep_validate(R, tol=DEFAULT_TOL):
    """Shapes, unitarity and functoriality of a representation."""
    G = R.groupoid
    rep = Report(f"representation {R.name} of {G.name}", tol)
    d = R.fiber_dims
    bad = [x for x in range(G.n_arrows) if R.U[x].shape != (d[G.tgt[x]], d[G.src[x]])]
    rep.add(make_check("shapes", 1.0 if bad else 0.0, 1.0, tol, witness=G.arrows[bad[0]] if bad else None))
    if bad:
        return rep
    worst, wit = 0.0, None
    for x in range(G.n_arrows):
        u = R.U[x]
        r = max(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1]), 2) if u.size else 0.0,
                np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0]), 2) if u.size else 0.0)
        if r > worst:
            worst, wit = r, G.arrows[x]
    rep.add(make_check("unitary", worst, 1.0, tol, witness=wit))
    worst, wit = 0.0, None
    for x, y in composable_pairs(G):
        xy = G.table[x, y]
        if xy < 0:
            worst, wit = 1.0, (G.arrows[x], G.arrows[y])
            break
        r = float(np.linalg.norm(R.U[xy] - R.U[x] @ R.U[y])) if R.U[xy].size else 0.0
        if r > worst:
            worst, wit = r, (G.arrows[x], G.arrows[y])
    rep.add(make_check("multiplicative", worst, 1.0, tol, witness=wit))
    worst, wit = 0.0, None
    for q in range(G.n_objects):
        u = R.U[G.ident[q]]
        r = float(np.linalg.norm(u - np.eye(u.shape[0]))) if u.size else 0.0
        if r > worst:
            worst, wit = r, G.objects[q]
    rep.add(make_check("unital", worst, 1.0, tol, witness=wit))
    return rep


def trivial_rep(G):
    return GroupoidRep(G, np.ones(G.n_objects, dtype=int), [np.eye(1)] * G.n_arrows, name="trivial")


def character_rep(G, values, name="character"):
    """One-dimensional representation ``U(x) = values[x]``."""
    return GroupoidRep(G, np.ones(G.n_objects, dtype=int), [np.array([[v]]) for v in values], name=name)


def sign_rep(G):
    """``U(x) = -1`` off the identities (a representation of groups of order 2)."""
    ident = set(G.ident.tolist())
    return character_rep(G, [1.0 if x in ident else -1.0 for x in range(G.n_arrows)], name="sign")


def permutation_rep(G, perms, name="permutation"):
    """Group groupoid acting through permutation matrices ``perms[x]``."""
    if G.n_objects != 1:
        raise GroupoidMismatch("permutation representations need a one-object groupoid")
    mats = []
    for p in perms:
        p = np.asarray(p)
        M = np.zeros((len(p), len(p)))
        M[p, np.arange(len(p))] = 1.0
        mats.append(M)
    return GroupoidRep(G, [len(perms[0])], mats, name=name)


def regular_rep(G):
    """``H_q = l^2(t^-1(q))`` with ``U(x) delta_z = delta_xz``."""
    fib = [G.t_fibre(q) for q in range(G.n_objects)]
    pos = {}
    for q, f in enumerate(fib):
        for k, z in enumerate(f):
            pos[int(z)] = k
    mats = []
    for x in range(G.n_arrows):
        src, dst = fib[G.src[x]], fib[G.tgt[x]]
        M = np.zeros((len(dst), len(src)))
        for k, z in enumerate(src):
            M[pos[int(G.table[x, z])], k] = 1.0
        mats.append(M)
    return GroupoidRep(G, [len(f) for f in fib], mats, name="regular")


def tensor_rep(R1, R2):
    if R1.groupoid != R2.groupoid:
        raise GroupoidMismatch("representations of different groupoids")
    return GroupoidRep(R1.groupoid, R1.fiber_dims * R2.fiber_dims,
                       [np.kron(a, b) for a, b in zip(R1.U, R2.U)], name=f"{R1.name}x{R2.name}")


# -- corepresentations -----------------------------------------------------------------

def codomain_module(Q):
    """``A`` as a ``B``-``A`` bimodule: ``b . a = a eta_t(b)``, ``a . c = ac``, ``<a, c> = a^* c``."""
    A, B = Q.A, Q.B
    I = A.basis()
    left = np.stack([A.right_mult_matrix(v) for v in Q.eta_t(B.basis())])
    right = np.stack([A.right_mult_matrix(e) for e in I])
    gram = A.mult(A.star(I)[:, None, :], I[None, :, :])
    return HilbertBimodule.from_dense(B, A, left, right, gram, label=f"{A.label}_{A.label}")


def _bundle_cache(Q):
    if not hasattr(Q, "_corep_cache"):
        Q._corep_cache = {}
    return Q._corep_cache


def _codomain(Q):
    c = _bundle_cache(Q)
    if "cod" not in c:
        c["cod"] = codomain_module(Q)
    return c["cod"]


def _localized(Q, tol):
    c = _bundle_cache(Q)
    if "Am" not in c:
        c["Am"] = localization(Q.A, Q.B, Q.inner_map(), Q.eta_s, Q.eta_t, tol)
    return c["Am"]


@dataclass
class Corepresentation:
    E: HilbertBimodule
    data: object                  # QuantumGroupoidData
    raw: np.ndarray               # (E.dim, A.dim, E.dim)
    counit: object = None         # LinearMap A -> B when available
    name: str = "corep"
    rep: GroupoidRep = None
    cache: dict = field(default_factory=dict, repr=False)

    def target(self, tol=DEFAULT_TOL):
        """``E (x)_B A``; raises :class:`CodomainFormNotPSD` when the induced form is indefinite."""
        if "T" not in self.cache:
            try:
                self.cache["T"] = interior_tensor(self.E, _codomain(self.data), tol, label=f"{self.name}xA")
            except FormNotPSD as exc:
                raise CodomainFormNotPSD(str(exc)) from None
        return self.cache["T"]

    def delta(self, tol=DEFAULT_TOL):
        """``delta(e_i)`` in the coordinates of :meth:`target`, shape ``(E.dim, T.dim)``."""
        T = self.target(tol)
        cod = _codomain(self.data)
        r = np.einsum("yp,api->ayi", np.linalg.inv(cod.ambient), self.raw)
        return T.quotient(r).T

    def scaled(self, c):
        return Corepresentation(self.E, self.data, c * self.raw, self.counit, f"{c}*{self.name}", self.rep)

    def twisted(self, V):
        """``delta o V`` for a linear map ``V`` on ``E`` (sector coordinates)."""
        return Corepresentation(self.E, self.data, np.einsum("api,ij->apj", self.raw, V), self.counit,
                                f"{self.name}oV", self.rep)


def _fibre_module(B, dims):
    """Sections of ``q -> C^{dims[q]}`` as a symmetric ``C(G0)`` bimodule."""
    dims = np.asarray(dims, dtype=int)
    obj = np.repeat(np.arange(len(dims)), dims)
    N = len(obj)
    proj = np.zeros((B.dim, N, N))
    proj[obj, np.arange(N), np.arange(N)] = 1.0
    gram = np.zeros((N, N, B.dim))
    gram[np.arange(N), np.arange(N), obj] = 1.0
    return HilbertBimodule.from_dense(B, B, proj, proj, gram, label="sections")


def corep_from_rep(R, D):
    """``(delta Psi)(x) = U(x) Psi(s(x))`` on sections of the fibres of ``R``."""
    if not isinstance(D, GroupoidDual) or R.groupoid != D.groupoid:
        raise GroupoidMismatch("representation and dual are built on different groupoids")
    G, Q = D.groupoid, D.data
    off = R.offsets
    N = R.dim
    raw = np.zeros((N, G.n_arrows, N), dtype=complex)
    for x in range(G.n_arrows):
        t, s = G.tgt[x], G.src[x]
        raw[off[t]:off[t + 1], x, off[s]:off[s + 1]] = R.U[x]
    E = _fibre_module(Q.B, R.fiber_dims)
    amb = E.ambient
    raw = np.einsum("ax,xpk,ki->api", np.linalg.inv(amb), raw, amb)
    return Corepresentation(E, Q, raw, D.counit, name=R.name, rep=R)


def regular_corep(Q, tol=DEFAULT_TOL):
    """``delta = Delta`` on the localization ``A-``."""
    Am = _localized(Q, tol)
    Dt = Q.delta_tensor()
    amb = Am.ambient
    raw = np.einsum("ax,kxp,ki->api", np.linalg.inv(amb), Dt, amb)
    return Corepresentation(Am, Q, raw, name="regular")


def _vec_check(M, name, X, Y, tol, witness_of=lambda k: k, scale_from="both"):
    """Compare vectors ``X[k]``, ``Y[k]`` of ``M`` in the module norm."""
    d = M.vec_norm(X - Y)
    nx, ny = M.vec_norm(X), M.vec_norm(Y)
    sx = float(np.max(ny, initial=0.0)) if scale_from == "rhs" else \
        max(float(np.max(nx, initial=0.0)), float(np.max(ny, initial=0.0)))
    k = int(np.argmax(d)) if d.size else 0
    return make_check(name, float(np.max(d, initial=0.0)), sx, tol, witness=witness_of(k))


def _cc1(C, tol):
    """``<delta u, delta v>_A = eta_s(<u, v>_B)`` on basis pairs (scale: right side)."""
    Q, E = C.data, C.E
    T = C.target(tol)
    Dv = C.delta(tol)
    lhs = T.inner(Dv[:, None, :], Dv[None, :, :])
    rhs = Q.eta_s(E.dense_gram())
    A = Q.A
    d = A.norm(lhs - rhs).reshape(-1)
    sc = float(np.max(A.norm(rhs), initial=0.0))
    k = int(np.argmax(d)) if d.size else 0
    return make_check("cc1 inner product", float(d.max(initial=0.0)), sc, tol, witness=divmod(k, E.dim))


def _nested(C, L, tol):
    """Class in ``E (x) (A- (x) A)`` of raw triples ``L[a, x, y, i]`` (``A`` legs in standard coordinates)."""
    Q = C.data
    Am = _localized(Q, tol)
    cod = _codomain(Q)
    if "T3" not in C.cache:
        T23 = interior_tensor(Am, cod, tol, label="A-xA")
        C.cache["T3"] = interior_tensor(C.E, T23, tol, label=f"{C.name}x(A-xA)")
    T3 = C.cache["T3"]
    T23 = T3.tensor.E2
    r = np.tensordot(np.linalg.inv(Am.ambient), L, axes=(1, 1))            # (u, a, y, i)
    r = np.tensordot(np.linalg.inv(cod.ambient), r, axes=(1, 2))            # (v, u, a, i)
    r = np.swapaxes(r, 0, 1)
    q = T23.quotient(r)                        # (T23.dim, a, i)
    return T3, T3.quotient(np.moveaxis(q, 0, 1)).T


def _cc2(C, tol):
    """``(id (x) Delta) delta = (delta (x) id) delta``."""
    Q = C.data
    raw = C.raw
    L = np.einsum("api,pxy->axyi", raw, Q.delta_tensor())
    R = np.einsum("bxa,api->bxpi", raw, raw)
    T3, lhs = _nested(C, L, tol)
    _, rhs = _nested(C, R, tol)
    return _vec_check(T3, "cc2 coassociativity", lhs, rhs, tol)


def _counit(C, tol):
    """``sum e_a . eps(e_p) raw[a, p, i] = e_i``."""
    E = C.E
    eps = C.counit
    Rb = E.dense_right()                                    # (dim B, m, m)
    act = np.einsum("bp,bca->cap", eps.matrix, Rb)          # e_a . eps(e_p) in coordinates c
    got = np.einsum("cap,api->ic", act, C.raw)
    return _vec_check(E, "counit", got, np.eye(E.dim), tol)


def _module_relation(C, tol):
    """``delta(u . b) = delta(u) . eta_s(b)``."""
    E, Q = C.E, C.data
    T = C.target(tol)
    Dv = C.delta(tol)
    Rb = E.dense_right()
    lhs = np.einsum("bki,kt->bit", Rb, Dv).reshape(-1, T.dim)
    es = Q.eta_s(Q.B.basis())
    rhs = np.stack([T.right.contract(es[b]).apply(Dv) for b in range(Q.B.dim)]).reshape(-1, T.dim)
    return _vec_check(T, "module relation delta(u b) = delta(u) eta_s(b)", lhs, rhs, tol,
                      lambda k: (Q.B.basis_label(k // E.dim), k % E.dim))


def check_corep_axioms(C, tol=DEFAULT_TOL):
    """(cc1), (cc2), the module relation, and the counit law when a counit is known."""
    rep = Report(f"corepresentation {C.name}", tol)
    rep.add(_cc1(C, tol))
    rep.add(_cc2(C, tol))
    rep.add(_module_relation(C, tol))
    if C.counit is not None:
        rep.add(_counit(C, tol))
    else:
        rep.notes.append("counit check skipped: the bundle carries no counit")
    rep.info["E_dim"] = C.E.dim
    rep.info["E_full"] = C.E.is_full(tol)
    return rep


def quantum_corep_check(E, raw, Q, tol=DEFAULT_TOL):
    """Corepresentation checks for an arbitrary bundle.

    Raises :class:`CodomainFormNotPSD` when ``E (x)_B A`` carries an
    indefinite form for the chosen left action of ``B`` on ``A``.
    """
    if E.R != Q.B:
        raise BaseMismatch("module and bundle have different base algebras")
    C = Corepresentation(E, Q, np.asarray(raw, dtype=complex), name=E.label)
    C.target(tol)
    rep = check_corep_axioms(C, tol)
    rep.notes.append("quantum corepresentation axioms: inner-product compatibility, coassociativity, "
                     "module relation")
    return rep


# -- tensor products and equivalence ---------------------------------------------------------

def tensor_coreps(C1, C2, tol=DEFAULT_TOL):
    """``delta(u (x) v) = sum u_0 (x) v_0 (x) u_1 v_1`` on ``E1 (x)_B E2``."""
    if C1.data is not C2.data or C1.E.R != C2.E.L:
        raise BaseMismatch("corepresentations over different bundles or bases")
    Q = C1.data
    A = Q.A
    E12 = interior_tensor(C1.E, C2.E, tol, label=f"{C1.name}x{C2.name}")
    Lb = E12.lift(np.eye(E12.dim))                           # (m1, m2, k)
    Cst = A.structure_constants()
    X = np.einsum("ijk,api,crj,prs->acsk", Lb, C1.raw, C2.raw, Cst, optimize=True)
    raw = E12.quotient(X)                                    # (E12.dim, s, k)
    rep = None
    if C1.rep is not None and C2.rep is not None:
        rep = tensor_rep(C1.rep, C2.rep)
    counit = C1.counit if C1.counit is not None and C2.counit is not None else None
    return Corepresentation(E12, Q, raw, counit, name=f"{C1.name}x{C2.name}", rep=rep)


def _lowdin(E):
    """Per-sector ``G^{-1/2}`` of the flattened Gram, as a dense matrix."""
    W = np.zeros((E.dim, E.dim), dtype=complex)
    for pos, F in zip(E.layout.positions, E.flat_gram()):
        w, U = np.linalg.eigh(0.5 * (F + np.swapaxes(F, -1, -2).conj()))
        root = (U / np.sqrt(w)[..., None, :]) @ np.swapaxes(U, -1, -2).conj()
        W[pos[:, :, None], pos[:, None, :]] = root
    return W


def equivalence_report(C1, C2, tol=DEFAULT_TOL):
    """Unitary equivalence by aligning Lowdin-orthonormalized bases sector by sector."""
    rep = Report(f"equivalence {C1.name} ~ {C2.name}", tol)
    E1, E2 = C1.E, C2.E
    same = E1.layout.sizes == E2.layout.sizes and C1.data is C2.data
    rep.add(make_check("matching sectors", 0.0 if same else 1.0, 1.0, tol,
                       witness=(E1.layout.sizes, E2.layout.sizes)))
    if not same:
        return rep
    V = _lowdin(E2) @ np.linalg.inv(_lowdin(E1))
    for nm, a1, a2 in (("left", E1.dense_left(), E2.dense_left()), ("right", E1.dense_right(), E2.dense_right())):
        d = float(np.max(np.linalg.norm(V @ a1 - a2 @ V, 2, axis=(-2, -1)), initial=0.0))
        rep.add(make_check(f"alignment commutes with {nm} action", d, 1.0, tol))
    g1 = E1.dense_gram()
    g2 = np.einsum("xi,xyc,yj->ijc", V.conj(), E2.dense_gram(), V)
    B = E1.R
    d = float(np.max(B.norm(g2 - g1), initial=0.0))
    rep.add(make_check("alignment unitary", d, float(np.max(B.norm(g1), initial=0.0)), tol))
    T2 = C2.target(tol)
    cod = _codomain(C2.data)
    lhs = C2.delta(tol).T @ V                                 # (T2.dim, i): delta2(V e_i)
    moved = np.einsum("ba,api->bpi", V, C1.raw)
    rhs = T2.quotient(np.einsum("yp,api->ayi", np.linalg.inv(cod.ambient), moved))
    rep.add(_vec_check(T2, "alignment intertwines delta", lhs.T, rhs.T, tol))
    return rep


def tensor_associativity(C1, C2, C3, tol=DEFAULT_TOL):
    """``(C1 x C2) x C3`` and ``C1 x (C2 x C3)`` agree under the associator of the modules."""
    left = tensor_coreps(tensor_coreps(C1, C2, tol), C3, tol)
    C23 = tensor_coreps(C2, C3, tol)
    right = tensor_coreps(C1, C23, tol)
    U = associator(C1.E, C2.E, C3.E, tol, E12=left.E.tensor.E1, E23=C23.E, left=left.E, right=right.E)
    rep = Report("corepresentation tensor associativity", tol)
    rep.extend(U.check(tol), "associator ")
    Um = U.matrix()
    T2 = right.target(tol)
    cod = _codomain(C1.data)
    moved = np.einsum("ba,api->bpi", Um, left.raw)
    rhs = T2.quotient(np.einsum("yp,api->ayi", np.linalg.inv(cod.ambient), moved))
    lhs = right.delta(tol).T @ Um
    rep.add(_vec_check(T2, "delta associativity", lhs.T, rhs.T, tol))
    return rep
