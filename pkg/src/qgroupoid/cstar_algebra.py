"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra ``M_{n_1} + ... + M_{n_k}`` has the matrix units as standard basis,
ordered block-major and row-major inside each block. Elements are handled
internally as coefficient vectors over that basis; any array of shape
``(..., dim)`` is a batch of elements. ``AlgebraElement`` is the small public
wrapper around one such vector.
"""

from dataclasses import dataclass

import numpy as np

from .matrix_kernel import DEFAULT_TOL, is_psd, spectral_scale
from .reports import Check, Report, make_check


class ParentMismatch(ValueError):
    pass


class NotCommutative(ValueError):
    pass


class CStarAlgebra:
    """The algebra ``M_{n_1} + ... + M_{n_k}``."""

    def __init__(self, block_sizes, label="A"):
        sizes = tuple(int(n) for n in block_sizes)
        if not sizes or any(n <= 0 for n in sizes):
            raise ValueError(f"block sizes must be a nonempty list of positive ints, got {block_sizes}")
        self.block_sizes = sizes
        self.label = label
        self.offsets = np.concatenate([[0], np.cumsum([n * n for n in sizes])]).astype(int)
        self.rep_offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        self.dim = int(self.offsets[-1])
        self.rep_dim = int(self.rep_offsets[-1])
        self._basis_labels = [(k, i, j) for k, n in enumerate(sizes)
                              for i in range(n) for j in range(n)]
        # e_{kij}^* = e_{kji}
        self.star_perm = np.array([self.index(k, j, i) for (k, i, j) in self._basis_labels], dtype=int)
        # positions of each basis element inside the flattened faithful representation
        N = self.rep_dim
        self.rep_positions = np.array(
            [(self.rep_offsets[k] + i) * N + self.rep_offsets[k] + j for (k, i, j) in self._basis_labels],
            dtype=int)

    def __eq__(self, other):
        return isinstance(other, CStarAlgebra) and self.block_sizes == other.block_sizes

    def __hash__(self):
        return hash(self.block_sizes)

    def __repr__(self):
        return f"CStarAlgebra({list(self.block_sizes)}, label={self.label!r})"

    @property
    def is_commutative(self):
        return all(n == 1 for n in self.block_sizes)

    def index(self, k, i, j):
        n = self.block_sizes[k]
        return int(self.offsets[k] + i * n + j)

    def basis_label(self, p):
        return self._basis_labels[p]

    # -- vectors and blocks ----------------------------------------------

    def blocks_of(self, U):
        """Split ``(..., dim)`` coefficients into a list of ``(..., n, n)`` blocks."""
        U = np.asarray(U)
        return [U[..., self.offsets[k]:self.offsets[k + 1]].reshape(U.shape[:-1] + (n, n))
                for k, n in enumerate(self.block_sizes)]

    def from_blocks(self, blocks):
        lead = np.asarray(blocks[0]).shape[:-2]
        return np.concatenate([np.asarray(b, dtype=complex).reshape(lead + (-1,)) for b in blocks], axis=-1)

    def unit(self):
        return self.from_blocks([np.eye(n) for n in self.block_sizes])

    def basis(self):
        return np.eye(self.dim, dtype=complex)

    def zero(self):
        return np.zeros(self.dim, dtype=complex)

    def trace_vector(self):
        """Coefficients of the trace of the faithful representation."""
        t = np.zeros(self.dim)
        for k, n in enumerate(self.block_sizes):
            for i in range(n):
                t[self.index(k, i, i)] = 1.0
        return t

    def trace(self, U):
        return np.asarray(U) @ self.trace_vector()

    # -- algebra operations (batched) --------------------------------------

    def mult(self, U, V):
        """Product ``u v`` for broadcastable batches of coefficient vectors."""
        return self.from_blocks([a @ b for a, b in zip(self.blocks_of(U), self.blocks_of(V))])

    def star(self, U):
        return np.conj(np.asarray(U)[..., self.star_perm])

    def rep(self, U):
        """Faithful block-diagonal representation, shape ``(..., N, N)``."""
        U = np.asarray(U, dtype=complex)
        N = self.rep_dim
        out = np.zeros(U.shape[:-1] + (N * N,), dtype=complex)
        out[..., self.rep_positions] = U
        return out.reshape(U.shape[:-1] + (N, N))

    def unrep(self, M):
        """Inverse of ``rep`` on block-diagonal matrices (off-block parts dropped)."""
        M = np.asarray(M)
        N = self.rep_dim
        return M.reshape(M.shape[:-2] + (N * N,))[..., self.rep_positions]

    def norm(self, U):
        """C*-norm: largest spectral norm over blocks."""
        out = None
        for b in self.blocks_of(U):
            if b.shape[-1] == 1:
                nb = np.abs(b[..., 0, 0])
            else:
                nb = np.linalg.norm(b, 2, axis=(-2, -1))
            out = nb if out is None else np.maximum(out, nb)
        return out

    def left_mult_matrix(self, v):
        """Matrix of ``u -> v u`` on coefficient vectors."""
        return self.mult(np.asarray(v)[None, :], self.basis()).T

    def right_mult_matrix(self, v):
        """Matrix of ``u -> u v`` on coefficient vectors."""
        return self.mult(self.basis(), np.asarray(v)[None, :]).T

    def structure_constants(self):
        """``C[p, q, r]`` with ``e_p e_q = sum_r C[p, q, r] e_r``."""
        I = self.basis()
        return self.mult(I[:, None, :], I[None, :, :]).real

    def central_projections(self):
        """Block units ``z_k``, one per block, as coefficient vectors."""
        Z = np.zeros((len(self.block_sizes), self.dim), dtype=complex)
        for k, n in enumerate(self.block_sizes):
            for i in range(n):
                Z[k, self.index(k, i, i)] = 1.0
        return Z

    def element(self, v):
        return AlgebraElement.from_vector(self, v)

    def random_element(self, rng):
        return rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)


@dataclass(frozen=True)
class AlgebraElement:
    parent: CStarAlgebra
    blocks: tuple

    def __post_init__(self):
        shapes = tuple(np.shape(b) for b in self.blocks)
        if shapes != tuple((n, n) for n in self.parent.block_sizes):
            raise ValueError(f"block shapes {shapes} do not match {self.parent.block_sizes}")

    @classmethod
    def from_vector(cls, parent, v):
        v = np.asarray(v, dtype=complex)
        return cls(parent, tuple(b.copy() for b in parent.blocks_of(v)))

    @classmethod
    def unit(cls, parent):
        return cls.from_vector(parent, parent.unit())

    @property
    def vector(self):
        return self.parent.from_blocks(list(self.blocks))

    def star(self):
        return AlgebraElement(self.parent, tuple(b.conj().T for b in self.blocks))

    def norm(self):
        return float(self.parent.norm(self.vector))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return AlgebraElement(self.parent, tuple(b * other for b in self.blocks))

    def __rmul__(self, c):
        return AlgebraElement(self.parent, tuple(c * b for b in self.blocks))

    def __add__(self, other):
        if self.parent != other.parent:
            raise ParentMismatch("elements of different algebras")
        return AlgebraElement(self.parent, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        return self + (-1.0) * other

    def allclose(self, other, atol=1e-12):
        return self.parent == other.parent and np.allclose(self.vector, other.vector, atol=atol)


def multiply(a, c):
    if a.parent != c.parent:
        raise ParentMismatch(f"{a.parent!r} vs {c.parent!r}")
    return AlgebraElement(a.parent, tuple(x @ y for x, y in zip(a.blocks, c.blocks)))


KINDS = ("plain", "hom", "antihom")


class LinearMap:
    """Linear map between algebras, as a matrix over the standard bases."""

    def __init__(self, domain, codomain, matrix, kind="plain", name=""):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (codomain.dim, domain.dim):
            raise ValueError(f"matrix shape {matrix.shape} != ({codomain.dim}, {domain.dim})")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        self.kind = kind
        self.name = name

    def __call__(self, U):
        return np.asarray(U) @ self.matrix.T

    def compose(self, other, kind="plain"):
        """``self o other``."""
        if other.codomain != self.domain:
            raise ParentMismatch("cannot compose: codomain/domain differ")
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix, kind)

    def __repr__(self):
        return f"LinearMap({self.name or '?'}: {self.domain.label}->{self.codomain.label}, kind={self.kind})"


def identity_map(A, kind="hom"):
    return LinearMap(A, A, np.eye(A.dim), kind, "id")


def _max_norm_diff(A, X, Y):
    """Largest C*-norm of ``X - Y`` over a batch, with witness index and scale."""
    d = A.norm(X - Y).reshape(-1)
    scale = max(float(np.max(A.norm(X), initial=0.0)), float(np.max(A.norm(Y), initial=0.0)))
    k = int(np.argmax(d)) if d.size else 0
    return (float(d[k]) if d.size else 0.0), scale, k


def verify_kind(phi, tol=DEFAULT_TOL, kind=None, check_star=True):
    """Check that ``phi`` is a unital *-homomorphism or *-antihomomorphism.

    Multiplicativity is tested on all pairs of basis elements. ``check_star``
    can be switched off for maps such as an antipode that are only algebra
    antihomomorphisms.
    """
    kind = kind or phi.kind
    A, C = phi.domain, phi.codomain
    rep = Report(f"{phi.name or 'map'} is {kind}", tol)
    if kind == "plain":
        return rep
    img = phi.matrix.T  # row p = phi(e_p)
    const = A.structure_constants()
    lhs = np.einsum("pqr,rc->pqc", const, img)
    if kind == "hom":
        rhs = C.mult(img[:, None, :], img[None, :, :])
    else:
        rhs = C.mult(img[None, :, :], img[:, None, :])
    d, scale, k = _max_norm_diff(C, lhs.reshape(-1, C.dim), rhs.reshape(-1, C.dim))
    p, q = divmod(k, A.dim)
    rep.add(make_check("multiplicative" if kind == "hom" else "anti-multiplicative",
                       d, scale, tol, witness=(A.basis_label(p), A.basis_label(q))))
    if check_star:
        d, scale, k = _max_norm_diff(C, img[A.star_perm], C.star(img))
        rep.add(make_check("star-preserving", d, scale, tol, witness=A.basis_label(k)))
    u = phi(A.unit())
    d, scale, _ = _max_norm_diff(C, u[None], C.unit()[None])
    rep.add(make_check("unital", d, scale, tol))
    return rep


def characters(A):
    """Coordinate evaluations of a commutative algebra."""
    if not A.is_commutative:
        raise NotCommutative(f"{A!r} has a block of size > 1")
    C = CStarAlgebra([1], label="C")
    return [LinearMap(A, C, np.eye(A.dim)[k:k + 1], "hom", f"ev{k}") for k in range(A.dim)]


def gelfand_reconstruct(A, v):
    """Element rebuilt from its character values: ``sum_k chi_k(v) delta_k``."""
    chars = characters(A)
    vals = np.array([chi(v)[0] for chi in chars])
    return vals @ np.eye(A.dim)


def _choi_blocks(P):
    A, B = P.domain, P.codomain
    E = A.basis()
    prods = A.mult(A.star(E)[:, None, :], E[None, :, :])  # e_i^* e_j
    return B.rep(P(prods))  # (i, j, N, N)


def is_completely_positive(P, tol=DEFAULT_TOL):
    """PSD test of the Choi block matrix ``[rho_B(P(e_i^* e_j))]_{ij}``."""
    rep = Report(f"{P.name or 'map'} completely positive", tol)
    blocks = _choi_blocks(P)
    d, N = blocks.shape[0], blocks.shape[-1]
    choi = blocks.transpose(0, 2, 1, 3).reshape(d * N, d * N)
    herm = float(np.linalg.norm(choi - choi.conj().T))
    w = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    scale = spectral_scale(w)
    rep.add(make_check("choi-hermitian", herm, scale, tol))
    lam = float(w[0])
    rep.add(make_check("choi-psd", max(0.0, -lam), scale, tol, witness=round(lam, 12)))
    return rep


def is_faithful_positive(P, tol=DEFAULT_TOL):
    """Positive definiteness of the scalar Gram ``tr rho_B(P(e_i^* e_j))``."""
    rep = Report(f"{P.name or 'map'} faithful", tol)
    blocks = _choi_blocks(P)
    G = np.trace(blocks, axis1=-2, axis2=-1)
    G = 0.5 * (G + G.conj().T)
    w = np.linalg.eigvalsh(G)
    scale = spectral_scale(w)
    lam = float(w[0])
    ok = lam > tol * scale
    # faithfulness is discrete: a failing map kills a whole direction
    rep.add(Check("gram-positive-definite", 0.0 if ok else 1.0, ok, scale,
                  None if ok else round(lam, 12), f"min eigenvalue {lam:.3e}"))
    return rep


def is_psd_map_value(B, v, tol=DEFAULT_TOL):
    return is_psd(B.rep(v), tol)
