"""Dense complex matrix primitives: adjoints, hermitian eigensystems,
positivity and null spaces.

All thresholds are relative: a quantity counts as zero when it is at most
``tol * max(1, ||M||)``, where ``||M||`` is the largest absolute eigenvalue for
hermitian input and the Frobenius norm otherwise.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_TOL = 1e-9


class NotHermitian(ValueError):
    pass


class NotPSD(ValueError):
    pass


def as_cmatrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def adjoint(M):
    """Conjugate transpose."""
    return as_cmatrix(M).conj().T


def hermiticity_defect(M):
    M = as_cmatrix(M)
    if M.shape[0] != M.shape[1]:
        return np.inf
    return float(np.linalg.norm(M - M.conj().T))


def _require_hermitian(M, tol):
    M = as_cmatrix(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    if hermiticity_defect(M) > tol * scale:
        raise NotHermitian(f"matrix is not hermitian (defect {hermiticity_defect(M):.3e})")
    return 0.5 * (M + M.conj().T)


def _phase_normalize(V):
    # first entry of non-negligible modulus made real positive
    V = V.copy()
    for k in range(V.shape[1]):
        col = V[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.abs(col).max()))
        if big.size:
            z = col[big[0]]
            V[:, k] = col * (abs(z) / z)
    return V


def hermitian_eigensystem(M, tol=DEFAULT_TOL):
    """Ascending eigenvalues and a unitary matrix of eigenvectors (columns).

    Exactly diagonal input is answered with standard basis vectors, which keeps
    later compressions sparse. Otherwise LAPACK is used, eigenvector phases are
    normalized and eigenvalue ties are ordered lexicographically by entries.
    """
    H = _require_hermitian(M, tol)
    n = H.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    d = np.diag(H).real
    if not np.any(H - np.diag(np.diag(H))):
        order = np.argsort(d, kind="stable")
        return d[order].copy(), np.eye(n, dtype=complex)[:, order]
    w, V = np.linalg.eigh(H)
    V = _phase_normalize(V)
    scale = max(1.0, float(np.abs(w).max()))
    # cluster near-equal eigenvalues, then sort each cluster by entries
    keys = []
    cluster = 0
    for k in range(n):
        if k and w[k] - w[k - 1] > tol * scale:
            cluster += 1
        entries = np.round(V[:, k], 12)
        keys.append((cluster, tuple(np.column_stack([entries.real, entries.imag]).ravel())))
    order = sorted(range(n), key=lambda k: keys[k])
    return w[order], V[:, order]


def spectral_scale(w):
    return max(1.0, float(np.abs(w).max())) if len(w) else 1.0


def is_psd(M, tol=DEFAULT_TOL):
    """True iff the smallest eigenvalue is >= -tol * max(1, ||M||)."""
    H = _require_hermitian(M, tol)
    if H.shape[0] == 0:
        return True
    w = np.linalg.eigvalsh(H)
    return bool(w[0] >= -tol * spectral_scale(w))


def min_eigenvalue(M, tol=DEFAULT_TOL):
    H = _require_hermitian(M, tol)
    return float(np.linalg.eigvalsh(H)[0]) if H.shape[0] else 0.0


def null_space_split(G, tol=DEFAULT_TOL):
    """Split the space into the null space of a PSD matrix and its complement.

    Returns ``(null_basis, range_basis, range_eigenvalues)``; both bases have
    orthonormal columns and together form a unitary matrix.
    """
    w, V = hermitian_eigensystem(G, tol)
    scale = spectral_scale(w)
    if len(w) and w[0] < -tol * scale:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3e} below -{tol * scale:.1e}")
    null = w <= tol * scale
    return V[:, null], V[:, ~null], w[~null]


def null_space(G, tol=DEFAULT_TOL):
    """Orthonormal basis (columns) of the null space of a hermitian PSD matrix."""
    return null_space_split(G, tol)[0]


def range_basis(P, tol=DEFAULT_TOL):
    """Orthonormal basis of the column space of an arbitrary square matrix."""
    P = as_cmatrix(P)
    if P.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    return null_space_split(P @ P.conj().T, tol)[1]


def block_components(support):
    """Connected components of the graph whose adjacency is ``support``.

    Returns a list of index arrays, ordered by smallest member.
    """
    n = support.shape[0]
    if n == 0:
        return []
    sym = np.asarray(support, dtype=bool)
    sym = sym | sym.T | np.eye(n, dtype=bool)
    ncomp, labels = connected_components(csr_matrix(sym), directed=False)
    comps = [np.flatnonzero(labels == c) for c in range(ncomp)]
    comps.sort(key=lambda idx: idx[0])
    return comps


def spectral_norm(M):
    """Largest singular value, computed per connected block of the support."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    if M.shape[0] != M.shape[1]:
        return float(np.linalg.norm(M, 2))
    support = M != 0
    if not support.any():
        return 0.0
    comps = block_components(support)
    if len(comps) == 1:
        return float(np.linalg.norm(M, 2))
    best = 0.0
    singles = np.concatenate([c for c in comps if c.size == 1]) if any(c.size == 1 for c in comps) else None
    if singles is not None:
        best = float(np.abs(M[singles, singles]).max())
    for c in comps:
        if c.size > 1:
            best = max(best, float(np.linalg.norm(M[np.ix_(c, c)], 2)))
    return best
