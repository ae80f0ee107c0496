import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgroupoid.matrix_kernel import (NotHermitian, NotPSD, adjoint, block_components, hermitian_eigensystem,
                                     is_psd, min_eigenvalue, null_space, null_space_split, range_basis,
                                     spectral_norm)


def test_adjoint_examples():
    assert np.array_equal(adjoint(np.eye(3)), np.eye(3))
    assert np.array_equal(adjoint([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    assert adjoint([[1j]])[0, 0] == -1j


def test_eigensystem_diagonal_input():
    w, V = hermitian_eigensystem(np.diag([2.0, 1.0]))
    assert np.array_equal(w, [1.0, 2.0])
    assert np.array_equal(np.abs(V), [[0, 1], [1, 0]])


def test_eigensystem_pauli_x():
    w, V = hermitian_eigensystem([[0, 1], [1, 0]])
    assert np.allclose(w, [-1, 1], atol=1e-14)
    assert np.allclose(V.conj().T @ V, np.eye(2), atol=1e-14)


def test_eigensystem_gram_of_two_vectors():
    X = np.array([[1.0, 0.0], [1.0, 1.0]])
    w, _ = hermitian_eigensystem(X @ X.T)
    want = [(3 - np.sqrt(5)) / 2, (3 + np.sqrt(5)) / 2]
    assert np.allclose(w, want, atol=1e-14)


def test_eigensystem_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigensystem([[0, 1], [0, 0]])


def test_psd_examples():
    assert is_psd(np.eye(3))
    assert not is_psd(np.diag([1.0, -1.0]))
    # Choi matrix of the transpose map on M_2 is the swap on C^2 (x) C^2
    swap = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            swap[2 * i + j, 2 * j + i] = 1
    assert not is_psd(swap)
    assert min_eigenvalue(swap) == pytest.approx(-1.0, abs=1e-14)


def test_null_space_examples():
    assert null_space(np.zeros((2, 2))).shape == (2, 2)
    assert null_space(np.eye(3)).shape == (3, 0)
    N = null_space(np.ones((2, 2)))
    assert N.shape == (2, 1)
    v = N[:, 0] / N[0, 0] * abs(N[0, 0])
    assert np.allclose(v, np.array([1, -1]) / np.sqrt(2), atol=1e-14)


def test_null_space_rejects_indefinite():
    with pytest.raises(NotPSD):
        null_space(np.diag([1.0, -1.0]))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**31))
def test_null_split_is_unitary_and_exact(n, r, seed):
    r = min(r, n)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    G = X @ X.conj().T
    N, R, w = null_space_split(G)
    U = np.hstack([N, R])
    assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-10)
    assert N.shape[1] == n - (np.linalg.matrix_rank(X) if r else 0)
    assert np.allclose(G @ N, 0, atol=1e-9 * max(1, np.abs(G).max()))
    assert np.all(w > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**31))
def test_eigensystem_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = X + X.conj().T
    w, V = hermitian_eigensystem(H)
    assert np.all(np.diff(w) >= -1e-12)
    assert np.allclose(V @ np.diag(w) @ V.conj().T, H, atol=1e-10)


def test_eigensystem_is_deterministic(rng):
    X = rng.standard_normal((5, 5))
    H = X + X.T
    a = hermitian_eigensystem(H)
    b = hermitian_eigensystem(H.copy())
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_range_basis_spans_columns(rng):
    P = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 4))
    R = range_basis(P)
    assert R.shape[1] == 2
    assert np.allclose(R @ R.conj().T @ P, P, atol=1e-10)


def test_block_components_and_norm():
    M = np.zeros((4, 4))
    M[0, 2] = 3.0
    M[1, 1] = -2.0
    comps = block_components(M != 0)
    assert [list(c) for c in comps] == [[0, 2], [1], [3]]
    assert spectral_norm(M) == pytest.approx(3.0)
