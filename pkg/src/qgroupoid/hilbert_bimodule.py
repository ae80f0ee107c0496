"""Finite-dimensional Hilbert C*-bimodules.

A bimodule over ``L`` (left) and ``R`` (right) is a complex space with action
matrices for the basis of each algebra and an ``R``-valued Gram tensor
``gram[i, j] = <v_i, v_j>_R`` (conjugate-linear in the first slot). The space
is split into sectors cut out by the central projections of both algebras;
every action and every module map commuting with both actions is
block-diagonal in that split, which is what keeps tensor powers cheap.

The interior tensor product ``E1 (x)_M E2`` is formed sector by sector: the
raw tensor of a sector of ``E1`` and a sector of ``E2`` is cut down by a
central projection ``z`` of ``M`` (``u z (x) v = u (x) z v``), the induced
``R``-valued form is computed, and its null space is divided out.
"""

from dataclasses import dataclass

import numpy as np

from .blockops import BlockOp, Layout
from .cstar_algebra import CStarAlgebra
from .matrix_kernel import DEFAULT_TOL, NotPSD, null_space_split, range_basis, spectral_scale
from .reports import Report, make_check


class AlgebraMismatch(ValueError):
    pass


class FormNotPSD(ValueError):
    pass


class NotFaithful(ValueError):
    pass


class LeftActionNotAdjointable(ValueError):
    pass


class NotAdjointable(ValueError):
    pass


C1 = CStarAlgebra([1], label="C")


@dataclass
class TensorSector:
    """Bookkeeping for one sector of an interior tensor product."""
    i1: int              # sector of the left factor
    k: int               # central block of the middle algebra
    i2: int              # sector of the right factor
    W1: np.ndarray       # orthonormal basis of (sector i1) . z_k
    W2: np.ndarray       # orthonormal basis of z_k . (sector i2)
    A1: np.ndarray       # coordinates of u . z_k in W1, for u in sector i1
    A2: np.ndarray
    V: np.ndarray        # quotient basis inside W1 (x) W2 coordinates
    sel: np.ndarray = None  # set when V is a selection of coordinate vectors

    def project(self, K):
        """``V^H K V`` on the last two axes."""
        if self.sel is not None:
            return K[..., self.sel[:, None], self.sel[None, :]]
        return self.V.conj().T @ K @ self.V

    def restrict1(self, X):
        return X if self.W1 is None else self.W1.conj().T @ X @ self.W1

    def restrict2(self, Y):
        return Y if self.W2 is None else self.W2.conj().T @ Y @ self.W2

    def lift_basis(self):
        """Raw coordinates (sector i1 x sector i2) of the quotient basis, shape ``(m1, m2, r)``."""
        W1 = self.W1 if self.W1 is not None else np.eye(self.A1.shape[1])
        W2 = self.W2 if self.W2 is not None else np.eye(self.A2.shape[1])
        d1, d2 = W1.shape[1], W2.shape[1]
        V = self.V if self.sel is None else np.eye(d1 * d2)[:, self.sel]
        R = np.einsum("xa,yb,abr->xyr", W1, W2, V.reshape(d1, d2, -1))
        return R


def _congruence(T, G):
    """``T^H G[:, :, c] T`` for every ``c``; ``G`` has shape ``(m, m, K)``."""
    Gc = np.moveaxis(G, -1, 0)
    return np.moveaxis(T.conj().T @ Gc @ T, 0, -1)


class TensorData:
    def __init__(self, E1, E2, sectors):
        self.E1 = E1
        self.E2 = E2
        self.sectors = sectors
        self.by_pair = {}
        for s, rec in enumerate(sectors):
            self.by_pair.setdefault((rec.i1, rec.i2), []).append(s)


class HilbertBimodule:
    """Sector-decomposed Hilbert ``L``-``R`` bimodule.

    ``left`` and ``right`` are :class:`BlockOp` families indexed by the bases
    of ``L`` and ``R``; ``gram[g]`` has shape ``(n_g, m, m, dim R)`` for the
    size group ``g`` of the layout. ``ambient`` (optional) maps sector
    coordinates back to the coordinates the module was given in.
    """

    def __init__(self, L, R, layout, left, right, gram, label="E", ambient=None, tensor=None):
        self.L = L
        self.R = R
        self.layout = layout
        self.left = left
        self.right = right
        self.gram = [np.asarray(g, dtype=complex) for g in gram]
        self.label = label
        self.ambient = ambient
        self.tensor = tensor
        self._sqrt = None

    # -- construction --------------------------------------------------------

    @classmethod
    def from_dense(cls, L, R, left, right, gram, label="E", tol=DEFAULT_TOL, sectorize=True):
        """Module from dense data: ``left (dim L, m, m)``, ``right (dim R, m, m)``, ``gram (m, m, dim R)``.

        The space is re-expressed in sector coordinates when the data allow it;
        otherwise a single sector is used and :meth:`validate` reports why.
        """
        left = np.asarray(left, dtype=complex)
        right = np.asarray(right, dtype=complex)
        gram = np.asarray(gram, dtype=complex)
        m = gram.shape[0]
        if left.shape != (L.dim, m, m) or right.shape != (R.dim, m, m) or gram.shape != (m, m, R.dim):
            raise ValueError("inconsistent bimodule data shapes")
        if m == 0:
            raise ValueError("zero module")
        if sectorize:
            out = cls._sectorized(L, R, left, right, gram, label, tol)
            if out is not None:
                return out
        layout = Layout([m], [(None, None)])
        return cls(L, R, layout, BlockOp(layout, [left[:, None]]), BlockOp(layout, [right[:, None]]),
                   [gram[None]], label, ambient=np.eye(m))

    @classmethod
    def _sectorized(cls, L, R, left, right, gram, label, tol):
        m = gram.shape[0]
        zl = np.tensordot(L.central_projections(), left, axes=(1, 0))
        zr = np.tensordot(R.central_projections(), right, axes=(1, 0))
        bases, labels = [], []
        for a in range(len(zl)):
            for b in range(len(zr)):
                W = range_basis(zl[a] @ zr[b], tol)
                if W.shape[1]:
                    bases.append(W)
                    labels.append((a, b))
        if sum(W.shape[1] for W in bases) != m:
            return None
        T = np.hstack(bases)
        if np.linalg.matrix_rank(T) < m:
            return None
        Ti = np.linalg.inv(T)
        layout = Layout([W.shape[1] for W in bases], labels)
        lt = Ti @ left @ T
        rt = Ti @ right @ T
        gt = _congruence(T, gram)
        scale = max(1.0, np.linalg.norm(left), np.linalg.norm(right), np.linalg.norm(gram))
        Lb = BlockOp.from_dense(layout, lt)
        Rb = BlockOp.from_dense(layout, rt)
        gt_moved = np.moveaxis(gt, -1, 0)
        off = max(Lb.off_block_norm(lt), Rb.off_block_norm(rt), Lb.off_block_norm(gt_moved))
        if off > tol * scale:
            return None
        gb = [np.moveaxis(b, 0, -1) for b in BlockOp.from_dense(layout, gt_moved).blocks]
        return cls(L, R, layout, Lb, Rb, gb, label, ambient=T)

    # -- basic accessors -----------------------------------------------------

    @property
    def dim(self):
        return self.layout.dim

    def __repr__(self):
        return f"HilbertBimodule({self.label}: {self.L.label}-{self.R.label}, dim {self.dim}, {self.layout.n_sectors} sectors)"

    def gram_sector(self, s):
        g, p = self.layout.where[s]
        return self.gram[g][p]

    def dense_gram(self):
        out = np.zeros((self.dim, self.dim, self.R.dim), dtype=complex)
        for pos, G in zip(self.layout.positions, self.gram):
            out[pos[:, :, None], pos[:, None, :]] = G
        return out

    def dense_left(self):
        return self.left.dense()

    def dense_right(self):
        return self.right.dense()

    def flat_gram(self):
        """Scalar Gram ``trace rho_R <v_i, v_j>`` per size group, shape ``(n_g, m, m)``."""
        t = self.R.trace_vector()
        return [np.tensordot(G, t, axes=([-1], [0])) for G in self.gram]

    def _gram_roots(self):
        if self._sqrt is None:
            roots = []
            for F in self.flat_gram():
                F = 0.5 * (F + np.swapaxes(F, -1, -2).conj())
                w, U = np.linalg.eigh(F)
                w = np.clip(w, 0.0, None)
                with np.errstate(divide="ignore"):
                    wi = np.where(w > 0, 1.0 / np.sqrt(np.where(w > 0, w, 1.0)), 0.0)
                Uh = np.swapaxes(U, -1, -2).conj()
                roots.append(((U * np.sqrt(w)[..., None, :]) @ Uh, (U * wi[..., None, :]) @ Uh))
            self._sqrt = roots
        return self._sqrt

    def op_norm(self, T):
        """C*-norm of module operators: spectral norm for the flattened inner product."""
        roots = self._gram_roots()
        S = BlockOp(self.layout, [h @ b @ hi for (h, hi), b in zip(roots, T.blocks)])
        return S.norm()

    def inner(self, u, v):
        """``<u, v>_R`` for vectors of shape ``(..., dim)``; returns ``(..., dim R)``."""
        u = np.asarray(u)
        v = np.asarray(v)
        out = 0
        for pos, G in zip(self.layout.positions, self.gram):
            out = out + np.einsum("...ni,nijc,...nj->...c", u[..., pos].conj(), G, v[..., pos])
        if np.isscalar(out):
            return np.zeros(np.broadcast_shapes(u.shape[:-1], v.shape[:-1]) + (self.R.dim,), dtype=complex)
        return out

    def vec_norm(self, u):
        """Module norm ``||<u, u>_R||^(1/2)``."""
        return np.sqrt(self.R.norm(self.inner(u, u)))

    def act_left(self, a, v):
        """``lambda(a) v`` for algebra coefficients ``a``."""
        return self.left.contract(a).apply(v)

    def act_right(self, v, b):
        """``v . b``."""
        return self.right.contract(b).apply(v)

    # -- structure checks ----------------------------------------------------

    def validate(self, tol=DEFAULT_TOL):
        rep = Report(f"Hilbert bimodule {self.label}", tol)
        R, L = self.R, self.L
        # hermitian gram
        d, sc = 0.0, 0.0
        for G in self.gram:
            Gs = R.star(np.swapaxes(G, 1, 2))
            d = max(d, float(np.max(R.norm(G - Gs), initial=0.0)))
            sc = max(sc, float(np.max(R.norm(G), initial=0.0)))
        rep.add(make_check("gram-hermitian", d, sc, tol))
        # positive definite flattened gram
        lam, sc = np.inf, 1.0
        for F in self.flat_gram():
            w = np.linalg.eigvalsh(0.5 * (F + np.swapaxes(F, -1, -2).conj()))
            lam = min(lam, float(w.min()))
            sc = max(sc, spectral_scale(w.ravel()))
        rep.add(make_check("gram-positive-definite", 0.0 if lam > tol * sc else max(tol * sc - lam, 1.0), sc, tol,
                           witness=lam))
        # right compatibility <u, v b> = <u, v> b
        I = R.basis()
        d, sc = 0.0, 0.0
        for g, G in enumerate(self.gram):
            rb = self.right.blocks[g]  # (dimR, n, m, m)
            lhs = np.einsum("nilc,pnlj->pnijc", G, rb)
            rhs = R.mult(G[None], I[:, None, None, None, :])
            d = max(d, float(np.max(R.norm(lhs - rhs), initial=0.0)))
            sc = max(sc, float(np.max(R.norm(rhs), initial=0.0)))
        rep.add(make_check("right-compatibility", d, sc, tol))
        rep.extend(_action_checks(self, tol))
        return rep

    def is_full(self, tol=DEFAULT_TOL):
        vals = np.concatenate([G.reshape(-1, self.R.dim) for G in self.gram])
        return int(np.linalg.matrix_rank(vals, tol=tol * max(1.0, np.abs(vals).max()))) == self.R.dim

    # -- tensor products -------------------------------------------------------

    def quotient(self, raw):
        """Class in this tensor module of raw tensors of shape ``(m1, m2, *rest)``."""
        td = self._td()
        raw = np.asarray(raw)
        rest = raw.shape[2:]
        out = np.zeros((self.dim,) + rest, dtype=complex)
        L1, L2 = td.E1.layout, td.E2.layout
        for s, rec in enumerate(td.sectors):
            block = raw[L1.slice(rec.i1), L2.slice(rec.i2)]
            c = np.einsum("ax,by,xy...->ab...", rec.A1, rec.A2, block)
            c = c.reshape((-1,) + rest)
            if rec.sel is not None:
                q = c[rec.sel]
            else:
                q = np.tensordot(rec.V.conj().T, c, axes=(1, 0))
            out[self.layout.slice(s)] = q
        return out

    def lift(self, q):
        """Raw representative ``(m1, m2, *rest)`` of quotient vectors ``(dim, *rest)``."""
        td = self._td()
        q = np.asarray(q)
        rest = q.shape[1:]
        L1, L2 = td.E1.layout, td.E2.layout
        out = np.zeros((L1.dim, L2.dim) + rest, dtype=complex)
        for s, rec in enumerate(td.sectors):
            R = rec.lift_basis()
            out[L1.slice(rec.i1), L2.slice(rec.i2)] += np.tensordot(R, q[self.layout.slice(s)], axes=(2, 0))
        return out

    def elementary(self, u1, u2):
        """Class of ``u1 (x) u2``."""
        return self.quotient(np.multiply.outer(np.asarray(u1), np.asarray(u2)))

    def compress(self, X, Y):
        """``X (x) Y`` on this tensor module, batched over common batch axes.

        ``X`` must commute with the right action of the left factor and ``Y``
        with the left action of the right factor.
        """
        td = self._td()
        batch = np.broadcast_shapes(X.batch, Y.batch)
        out = BlockOp.zeros(self.layout, batch)
        for s, rec in enumerate(td.sectors):
            a = rec.restrict1(X.sector(rec.i1))
            b = rec.restrict2(Y.sector(rec.i2))
            K = np.einsum("...ij,...kl->...ikjl", a, b)
            K = K.reshape(K.shape[:-4] + (a.shape[-1] * b.shape[-1],) * 2)
            out.set_sector(s, rec.project(K))
        return out

    def compress_sum(self, X, Y):
        """``sum_l X[..., l] (x) Y[..., l]`` over the last batch axis."""
        td = self._td()
        batch = np.broadcast_shapes(X.batch, Y.batch)[:-1]
        out = BlockOp.zeros(self.layout, batch)
        for s, rec in enumerate(td.sectors):
            a = rec.restrict1(X.sector(rec.i1))
            b = rec.restrict2(Y.sector(rec.i2))
            K = np.einsum("...lij,...lkm->...ikjm", a, b)
            K = K.reshape(K.shape[:-4] + (a.shape[-1] * b.shape[-1],) * 2)
            out.set_sector(s, rec.project(K))
        return out

    def _td(self):
        if self.tensor is None:
            raise ValueError(f"{self.label} is not an interior tensor product")
        return self.tensor


def _action_checks(E, tol):
    """Left action is a unital adjointable *-homomorphism, right action a unital
    anti-homomorphism, and the two commute."""
    rep = Report("actions", tol)
    L, R = E.L, E.R
    lam, rho = E.left, E.right
    CL = L.structure_constants()
    prod = (lam[:, None] @ lam[None, :])
    lin = lam.contract(CL)
    diff = E.op_norm(prod - lin)
    k = int(np.argmax(diff)) if diff.size else 0
    scale = max(float(np.max(E.op_norm(lam), initial=0.0)), 1.0)
    rep.add(make_check("left-multiplicative", float(diff.max(initial=0.0)), scale, tol,
                       witness=divmod(k, L.dim)))
    one = lam.contract(L.unit()) - BlockOp.identity(E.layout)
    rep.add(make_check("left-unital", float(E.op_norm(one)), 1.0, tol))
    adj = adjointness_defect(E, lam[L.star_perm], lam)
    rep.add(make_check("left-adjointable", adj[0], adj[1], tol, witness=adj[2]))
    CR = R.structure_constants()
    prod = rho[None, :] @ rho[:, None]  # rho(e_p e_q) = rho(e_q) rho(e_p)
    lin = rho.contract(CR)
    diff = E.op_norm(prod - lin)
    k = int(np.argmax(diff)) if diff.size else 0
    rep.add(make_check("right-anti-multiplicative", float(diff.max(initial=0.0)), scale, tol,
                       witness=divmod(k, R.dim)))
    one = rho.contract(R.unit()) - BlockOp.identity(E.layout)
    rep.add(make_check("right-unital", float(E.op_norm(one)), 1.0, tol))
    comm = lam[:, None] @ rho[None, :] - rho[None, :] @ lam[:, None]
    diff = E.op_norm(comm)
    k = int(np.argmax(diff)) if diff.size else 0
    rep.add(make_check("actions-commute", float(diff.max(initial=0.0)), scale, tol, witness=divmod(k, R.dim)))
    return rep


def adjointness_defect(E, Tstar, T):
    """Largest ``||<T* u, v> - <u, T v>||`` over basis pairs (batched over operators).

    Returns ``(defect, scale, witness batch index)``.
    """
    R = E.R
    d = np.zeros(T.batch)
    sc = 0.0
    for g, G in enumerate(E.gram):
        A = Tstar.blocks[g]
        B = T.blocks[g]
        lhs = np.einsum("...nki,nkjc->...nijc", A.conj(), G)
        rhs = np.einsum("nikc,...nkj->...nijc", G, B)
        nd = R.norm(lhs - rhs)
        d = np.maximum(d, nd.reshape(nd.shape[:len(T.batch)] + (-1,)).max(axis=-1))
        sc = max(sc, float(np.max(R.norm(rhs), initial=0.0)))
    k = int(np.argmax(d)) if d.size else 0
    return float(np.max(d, initial=0.0)), sc, k


@dataclass
class BoundedOperator:
    on: HilbertBimodule
    matrix: np.ndarray
    adjoint_matrix: np.ndarray


def adjoint_of(T, E, tol=DEFAULT_TOL):
    """Adjoint of a dense operator ``T`` on ``E`` w.r.t. the ``R``-valued form.

    Solves ``X^H G_c = G_c T`` for every basis element ``c`` of ``R`` by least
    squares; raises ``NotAdjointable`` when the residual exceeds tolerance.
    """
    T = np.asarray(T, dtype=complex)
    G = E.dense_gram()
    m, R = E.dim, E.R.dim
    Gs = G.transpose(0, 2, 1).reshape(m, R * m)  # [G_1 ... G_R]
    rhs = np.concatenate([G[:, :, c] @ T for c in range(R)], axis=1)
    Yt, *_ = np.linalg.lstsq(Gs.T, rhs.T, rcond=None)
    Y = Yt.T
    res = float(np.linalg.norm(Y @ Gs - rhs))
    scale = max(1.0, float(np.linalg.norm(rhs)))
    if res > tol * scale:
        raise NotAdjointable(f"no adjoint (least-squares residual {res / scale:.3e})")
    return BoundedOperator(E, T, Y.conj().T)


def canonical_over_self(B):
    """``B`` as a ``B``-``B`` bimodule with ``<a, c> = a^* c``."""
    I = B.basis()
    left = np.stack([B.left_mult_matrix(e) for e in I])
    right = np.stack([B.right_mult_matrix(e) for e in I])
    gram = B.mult(B.star(I)[:, None, :], I[None, :, :])
    return HilbertBimodule.from_dense(B, B, left, right, gram, label=f"{B.label}_{B.label}")


def hilbert_space(G, label="H"):
    """Finite-dimensional Hilbert space with Gram matrix ``G`` as a C-C bimodule."""
    G = np.asarray(G, dtype=complex)
    m = G.shape[0]
    eye = np.eye(m)[None]
    return HilbertBimodule.from_dense(C1, C1, eye, eye, G[:, :, None], label=label)


def localization(A, B, P, eta_s, eta_t, tol=DEFAULT_TOL, label="A-"):
    """``A`` as a ``B``-``B`` bimodule: ``<a, c> = P(a^* c)``, ``lambda(b) a = a eta_t(b)``,
    ``a . b = a eta_s(b)``.

    ``P`` must be faithful (no quotient is taken) and the left action must be
    adjointable.
    """
    I = A.basis()
    gram = P(A.mult(A.star(I)[:, None, :], I[None, :, :]))
    flat = np.tensordot(gram, B.trace_vector(), axes=([-1], [0]))
    w = np.linalg.eigvalsh(0.5 * (flat + flat.conj().T))
    if w[0] <= tol * spectral_scale(w):
        raise NotFaithful(f"inner-product map is not faithful (min eigenvalue {w[0]:.3e})")
    left = np.stack([A.right_mult_matrix(v) for v in eta_t(B.basis())])
    right = np.stack([A.right_mult_matrix(v) for v in eta_s(B.basis())])
    E = HilbertBimodule.from_dense(B, B, left, right, gram, label=label, tol=tol)
    lam = E.left
    d, sc, k = adjointness_defect(E, lam[B.star_perm], lam)
    if d > tol * max(1.0, sc):
        raise LeftActionNotAdjointable(f"lambda({B.basis_label(k)}) has no adjoint (defect {d:.3e})")
    return E


# -- interior tensor product ---------------------------------------------------

def _is_identity(W):
    return W.shape[0] == W.shape[1] and np.array_equal(W, np.eye(W.shape[0]))


def interior_tensor(E1, E2, tol=DEFAULT_TOL, label=None):
    """Rieffel interior tensor product ``E1 (x)_M E2`` with the null space divided out."""
    if E1.R != E2.L:
        raise AlgebraMismatch(f"right algebra of {E1.label} differs from left algebra of {E2.label}")
    M, R = E1.R, E2.R
    Z = M.central_projections()
    tr = R.trace_vector()
    L1, L2 = E1.layout, E2.layout
    r1z = E1.right.contract(Z)
    l2z = E2.left.contract(Z)

    def cut(op_z, layout, s, k):
        P = op_z[k].sector(s)
        if _is_identity(P):
            return None, np.eye(P.shape[0])
        if not np.any(P):
            return np.zeros((P.shape[0], 0)), np.zeros((0, P.shape[0]))
        W = range_basis(P, tol)
        return W, W.conj().T @ P

    cuts1 = {}
    for s in range(L1.n_sectors):
        for k in range(len(Z)):
            W, A = cut(r1z, L1, s, k)
            if A.shape[0]:
                cuts1.setdefault(k, []).append((s, W, A))
    cuts2 = {}
    for s in range(L2.n_sectors):
        for k in range(len(Z)):
            W, A = cut(l2z, L2, s, k)
            if A.shape[0]:
                cuts2.setdefault(k, []).append((s, W, A))

    # per-cut pieces of the raw form
    g1w, h2w = {}, {}
    I_M = M.basis()
    for k, items in cuts1.items():
        for s, W, _ in items:
            G = np.moveaxis(E1.gram_sector(s), -1, 0)  # (dimM, m, m)
            g1w[s, k] = G if W is None else W.conj().T @ G @ W
    for k, items in cuts2.items():
        for s, W, _ in items:
            G = np.moveaxis(E2.gram_sector(s), -1, 0)  # (dimR, m, m)
            lam = E2.left.sector(s)  # (dimM, m, m)
            H = G[None] @ lam[:, None]  # (dimM, dimR, m, m)
            h2w[s, k] = H if W is None else W.conj().T @ H @ W

    records, sizes, grams, lefts, rights = [], [], [], [], []
    for k in range(len(Z)):
        for s1, W1, A1 in cuts1.get(k, []):
            for s2, W2, A2 in cuts2.get(k, []):
                a, b = g1w[s1, k], h2w[s2, k]
                d1, d2 = a.shape[-1], b.shape[-1]
                raw = np.einsum("bij,bckl->cikjl", a, b).reshape(R.dim, d1 * d2, d1 * d2)
                flat = np.tensordot(tr, raw, axes=(0, 0))
                try:
                    _, V, _ = null_space_split(flat, tol)
                except NotPSD as exc:
                    raise FormNotPSD(f"tensor form not positive on sector ({s1},{k},{s2}): {exc}") from None
                if V.shape[1] == 0:
                    continue
                sel = None
                if np.count_nonzero(V) == V.shape[1] and np.all(np.abs(V[V != 0]) == 1.0):
                    sel = np.sort(np.argmax(np.abs(V), axis=0))
                    V = np.eye(d1 * d2)[:, sel]
                rec = TensorSector(s1, k, s2, W1, W2, A1, A2, V, sel)
                records.append(rec)
                sizes.append(V.shape[1])
                grams.append(np.moveaxis(rec.project(raw), 0, -1))
                lam1 = rec.restrict1(E1.left.sector(s1))
                rho2 = rec.restrict2(E2.right.sector(s2))
                lefts.append(rec.project(np.einsum("pij,kl->pikjl", lam1, np.eye(d2)).reshape(-1, d1 * d2, d1 * d2)))
                rights.append(rec.project(np.einsum("ij,pkl->pikjl", np.eye(d1), rho2).reshape(-1, d1 * d2, d1 * d2)))
    if not records:
        raise FormNotPSD("the tensor product is the zero module")
    layout = Layout(sizes, [(r.i1, r.k, r.i2) for r in records])
    left = BlockOp.zeros(layout, (E1.L.dim,))
    right = BlockOp.zeros(layout, (R.dim,))
    gram = [np.zeros((len(ss), m, m, R.dim), dtype=complex) for m, ss in layout.groups]
    for s in range(len(records)):
        left.set_sector(s, lefts[s])
        right.set_sector(s, rights[s])
        g, p = layout.where[s]
        gram[g][p] = grams[s]
    return HilbertBimodule(E1.L, R, layout, left, right, gram,
                           label=label or f"({E1.label}x{E2.label})",
                           tensor=TensorData(E1, E2, records))


# -- associator ---------------------------------------------------------------

class Associator:
    """Canonical identification ``(E1 x E2) x E3 -> E1 x (E2 x E3)``.

    It maps each sector of the left model into exactly one sector of the right
    model; ``blocks[s] = (t, U_st)``.
    """

    def __init__(self, src, dst, blocks):
        self.src = src
        self.dst = dst
        self.blocks = blocks

    def matrix(self):
        U = np.zeros((self.dst.dim, self.src.dim), dtype=complex)
        for s, (t, B) in enumerate(self.blocks):
            U[self.dst.layout.slice(t), self.src.layout.slice(s)] = B
        return U

    def apply(self, v):
        v = np.asarray(v)
        out = np.zeros((self.dst.dim,) + v.shape[1:], dtype=complex)
        for s, (t, B) in enumerate(self.blocks):
            out[self.dst.layout.slice(t)] = np.tensordot(B, v[self.src.layout.slice(s)], axes=(1, 0))
        return out

    def inverse_apply(self, v):
        v = np.asarray(v)
        out = np.zeros((self.src.dim,) + v.shape[1:], dtype=complex)
        for s, (t, B) in enumerate(self.blocks):
            out[self.src.layout.slice(s)] = np.linalg.solve(B, v[self.dst.layout.slice(t)].reshape(B.shape[0], -1)
                                                            ).reshape(v[self.dst.layout.slice(t)].shape)
        return out

    def pull_back(self, X):
        """``U^-1 X U`` for a block operator family on the right model."""
        out = BlockOp.zeros(self.src.layout, X.batch)
        for s, (t, B) in enumerate(self.blocks):
            out.set_sector(s, np.linalg.solve(B, X.sector(t) @ B))
        return out

    def check(self, tol=DEFAULT_TOL):
        rep = Report("associator", tol)
        R = self.src.R
        hit = sorted(t for t, _ in self.blocks)
        bij = len(self.blocks) == self.dst.layout.n_sectors and hit == list(range(self.dst.layout.n_sectors)) \
            and all(B.shape[0] == B.shape[1] for _, B in self.blocks)
        rep.add(make_check("bijective", 0.0 if bij else 1.0, 1.0, tol))
        d, sc, rt = 0.0, 0.0, 0.0
        for s, (t, B) in enumerate(self.blocks):
            G = self.src.gram_sector(s)
            Gt = self.dst.gram_sector(t)
            pulled = _congruence(B, Gt)
            d = max(d, float(np.max(R.norm(pulled - G), initial=0.0)))
            sc = max(sc, float(np.max(R.norm(G), initial=0.0)))
            if B.shape[0] == B.shape[1]:
                rt = max(rt, float(np.linalg.norm(np.linalg.solve(B, B) - np.eye(B.shape[0]), 2)))
        rep.add(make_check("inner-product-preserved", d, sc, tol))
        rep.add(make_check("inverse-roundtrip", rt, 1.0, tol))
        return rep


def associator(E1, E2, E3, tol=DEFAULT_TOL, E12=None, E23=None, left=None, right=None):
    """Build both bracketings (unless supplied) and the identification between them."""
    E12 = E12 or interior_tensor(E1, E2, tol)
    E23 = E23 or interior_tensor(E2, E3, tol)
    left = left or interior_tensor(E12, E3, tol)
    right = right or interior_tensor(E1, E23, tol)
    t12, tl, t23, tr = E12.tensor, left.tensor, E23.tensor, right.tensor
    blocks = []
    for s, rec in enumerate(tl.sectors):
        Rs = rec.lift_basis()                              # (m_a, m_s3, r)
        a = t12.sectors[rec.i1]
        La = a.lift_basis()                                # (m_s1, m_s2, m_a)
        T = np.einsum("xya,azr->xyzr", La, Rs)             # (m_s1, m_s2, m_s3, r)
        found = []
        for b in t23.by_pair.get((a.i2, rec.i2), []):
            rb = t23.sectors[b]
            c = np.einsum("dy,ez,xyzr->xder", rb.A1, rb.A2, T)
            c = c.reshape(c.shape[0], -1, c.shape[-1])
            yb = c[:, rb.sel] if rb.sel is not None else np.einsum("ij,xjr->xir", rb.V.conj().T, c)
            for t in tr.by_pair.get((a.i1, b), []):
                rt = tr.sectors[t]
                c2 = np.einsum("dx,ey,xyr->der", rt.A1, rt.A2, yb).reshape(-1, yb.shape[-1])
                q = c2[rt.sel] if rt.sel is not None else rt.V.conj().T @ c2
                if np.any(np.abs(q) > tol):
                    found.append((t, q))
        if len(found) != 1:
            raise ValueError(f"associator does not respect sectors at sector {s} ({len(found)} targets)")
        blocks.append(found[0])
    return Associator(left, right, blocks)
