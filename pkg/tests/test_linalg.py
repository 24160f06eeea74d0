import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aluthge.errors import NotHermitian, NotPsd, NotSquare
from aluthge.linalg import (
    EPS,
    hermitian_eigendecompose,
    numerical_rank,
    pseudo_inverse,
    psd_sqrt,
    singular_values,
    svd,
)
from aluthge.generators import random_unitary


def cgauss(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def hermitian(rng, d):
    a = cgauss(rng, d, d)
    return (a + a.conj().T) / 2


seeds = st.integers(0, 2**32 - 1)
small_dims = st.integers(1, 9)


# --- Hermitian eigendecomposition -------------------------------------------


def test_eigh_diagonal_returns_sorted_permutation():
    dec = hermitian_eigendecompose(np.diag([3.0, 1.0]))
    assert np.allclose(dec.eigenvalues, [1.0, 3.0], atol=1e-15)
    assert np.allclose(np.abs(dec.vectors), [[0, 1], [1, 0]], atol=1e-15)


def test_eigh_swap_matrix():
    dec = hermitian_eigendecompose(np.array([[0, 1], [1, 0]]))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_eigh_planted_spectrum():
    rng = np.random.default_rng(6)
    q = random_unitary(rng, 6)
    d = np.array([-4.0, -1.0, 0.0, 0.5, 2.0, 7.0])
    a = q.conj().T @ np.diag(d) @ q
    dec = hermitian_eigendecompose(a)
    assert np.allclose(dec.eigenvalues, d, atol=1e-12)
    recon = (dec.vectors * dec.eigenvalues) @ dec.vectors.conj().T
    assert np.linalg.norm(recon - a) <= 1e-11 * (1 + np.linalg.norm(a))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=small_dims)
def test_eigh_matches_lapack(seed, d):
    rng = np.random.default_rng(seed)
    a = hermitian(rng, d)
    dec = hermitian_eigendecompose(a)
    u = dec.vectors
    assert np.linalg.norm(u.conj().T @ u - np.eye(d)) <= 1e-12 * d
    assert np.linalg.norm((u * dec.eigenvalues) @ u.conj().T - a) <= 1e-11 * (1 + np.linalg.norm(a))
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(a), atol=1e-12 * (1 + np.linalg.norm(a)))


def test_eigh_repeated_and_zero():
    dec = hermitian_eigendecompose(np.zeros((3, 3)))
    assert np.all(dec.eigenvalues == 0)
    assert np.allclose(dec.vectors, np.eye(3))
    dec = hermitian_eigendecompose(np.eye(4) * 2.5)
    assert np.allclose(dec.eigenvalues, 2.5)


def test_eigh_errors():
    with pytest.raises(NotSquare):
        hermitian_eigendecompose(np.zeros((2, 3)))
    with pytest.raises(NotHermitian):
        hermitian_eigendecompose(np.array([[0, 1], [0, 0]]))


def test_eigh_symmetrizes_small_skew_part():
    a = np.array([[1.0, 2.0], [2.0 + 1e-13, 5.0]])
    dec = hermitian_eigendecompose(a)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh((a + a.T) / 2), atol=1e-13)


def test_eigh_is_bitwise_reproducible():
    rng = np.random.default_rng(11)
    a = hermitian(rng, 7)
    one = hermitian_eigendecompose(a)
    two = hermitian_eigendecompose(a.copy())
    assert np.array_equal(one.eigenvalues, two.eigenvalues)
    assert np.array_equal(one.vectors, two.vectors)


# --- SVD --------------------------------------------------------------------


def test_svd_zero_matrix():
    dec = svd(np.zeros((3, 2)))
    assert np.all(dec.singular_values == 0)
    assert np.allclose(dec.u.conj().T @ dec.u, np.eye(2))


def test_svd_diagonal_with_sign():
    assert np.allclose(svd(np.diag([2.0, -3.0])).singular_values, [3.0, 2.0], atol=1e-15)


def test_svd_planted_values():
    rng = np.random.default_rng(53)
    u = random_unitary(rng, 5)[:, :3]
    v = random_unitary(rng, 3)
    planted = np.array([5.0, 1.0, 1e-3])
    a = (u * planted) @ v.conj().T
    s = svd(a).singular_values
    assert np.all(np.abs(s - planted) <= 1e-10 * planted)


@settings(max_examples=80, deadline=None)
@given(seed=seeds, m=small_dims, n=small_dims, rank=st.integers(0, 9))
def test_svd_invariants(seed, m, n, rank):
    rng = np.random.default_rng(seed)
    a = cgauss(rng, m, n)
    if rank < min(m, n):
        a = cgauss(rng, m, rank) @ cgauss(rng, rank, n)
    dec = svd(a)
    k = min(m, n)
    s = dec.singular_values
    assert s.shape == (k,)
    assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
    assert np.linalg.norm(dec.reconstruct() - a) <= 1e-11 * (1 + np.linalg.norm(a))
    assert np.linalg.norm(dec.u.conj().T @ dec.u - np.eye(k)) <= 1e-12 * k
    assert np.linalg.norm(dec.v.conj().T @ dec.v - np.eye(k)) <= 1e-12 * k
    assert np.allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-12 * (1 + np.linalg.norm(a)))


def test_singular_values_graded_columns():
    # widely graded columns stress the one-sided sweep's stopping test
    rng = np.random.default_rng(4)
    for _ in range(50):
        a = cgauss(rng, 6, 4) @ np.diag(10.0 ** rng.uniform(-14, 0, 4))
        ref = np.linalg.svd(a, compute_uv=False)
        assert np.allclose(singular_values(a), ref, atol=1e-14 * ref[0])


def test_svd_agrees_with_eigh_on_psd():
    rng = np.random.default_rng(2)
    for d in range(1, 9):
        b = cgauss(rng, d, d)
        a = b @ b.conj().T
        eig = hermitian_eigendecompose(a).eigenvalues[::-1]
        s = svd(a).singular_values
        assert np.all(np.abs(s - eig) <= 1e-10 * (1 + s[0]))


# --- numerical rank ---------------------------------------------------------


def test_rank_examples():
    assert numerical_rank(np.eye(4)) == 4
    assert numerical_rank(np.outer([1, 2, 3], [1j, 0, 4])) == 1
    assert numerical_rank(np.diag([1.0, 1e-20])) == 1
    assert numerical_rank(np.zeros((3, 3))) == 0


def test_rank_tolerance_is_strict_and_overridable():
    a = np.diag([1.0, 1e-6])
    assert numerical_rank(a, tol=1e-6) == 1
    assert numerical_rank(a, tol=1e-7) == 2
    # default cutoff is max(m, n)·eps·σ_max
    assert numerical_rank(np.diag([1.0, 3 * EPS])) == 2
    assert numerical_rank(np.diag([1.0, 1.5 * EPS])) == 1


def test_rank_unitary_invariance():
    rng = np.random.default_rng(8)
    for _ in range(100):
        d = int(rng.integers(2, 8))
        r = int(rng.integers(0, d + 1))
        a = cgauss(rng, d, r) @ cgauss(rng, r, d)
        u, v = random_unitary(rng, d), random_unitary(rng, d)
        assert numerical_rank(u @ a @ v) == numerical_rank(a) == r


# --- PSD square root --------------------------------------------------------


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    assert np.all(psd_sqrt(np.zeros((3, 3))) == 0)
    rng = np.random.default_rng(1)
    q = random_unitary(rng, 3)
    a = q.conj().T @ np.diag([1.0, 2.0, 5.0]) @ q
    s = psd_sqrt(a)
    assert np.linalg.norm(s @ s - a) <= 1e-10
    assert np.allclose(s, s.conj().T)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, d=small_dims, r=st.integers(0, 9))
def test_psd_sqrt_squares_back(seed, d, r):
    rng = np.random.default_rng(seed)
    b = cgauss(rng, d, min(r, d))
    a = b @ b.conj().T
    s = psd_sqrt(a)
    assert np.linalg.norm(s @ s - a) <= 1e-10 * (1 + np.linalg.norm(a))
    assert np.min(np.linalg.eigvalsh(s)) >= -1e-12 * (1 + np.linalg.norm(s))


def test_psd_sqrt_errors():
    with pytest.raises(NotPsd):
        psd_sqrt(np.diag([1.0, -0.5]))
    with pytest.raises(NotHermitian):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))
    # tiny negative eigenvalues from rounding are clamped, not rejected
    s = psd_sqrt(np.diag([1.0, -1e-14]))
    assert np.allclose(s, np.diag([1.0, 0.0]))


# --- pseudo-inverse ---------------------------------------------------------


def moore_penrose_residual(a, x):
    return max(
        np.linalg.norm(a @ x @ a - a),
        np.linalg.norm(x @ a @ x - x),
        np.linalg.norm((a @ x).conj().T - a @ x),
        np.linalg.norm((x @ a).conj().T - x @ a),
    )


def test_pinv_examples():
    assert np.allclose(pseudo_inverse(np.eye(3)), np.eye(3))
    assert np.allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def test_pinv_rank_two():
    rng = np.random.default_rng(3)
    a = cgauss(rng, 4, 2) @ cgauss(rng, 2, 4)
    x = pseudo_inverse(a)
    assert moore_penrose_residual(a, x) <= 1e-9 * (1 + np.linalg.norm(a) * np.linalg.norm(x))
    assert np.allclose(x, np.linalg.pinv(a), atol=1e-10 * np.linalg.norm(x))


@settings(max_examples=50, deadline=None)
@given(seed=seeds, m=small_dims, n=small_dims, r=st.integers(0, 9))
def test_pinv_properties(seed, m, n, r):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    a = cgauss(rng, m, r) @ cgauss(rng, r, n)
    x = pseudo_inverse(a)
    assert x.shape == (n, m)
    assert moore_penrose_residual(a, x) <= 1e-9 * (1 + np.linalg.norm(a) * np.linalg.norm(x))
    # pinv(pinv(a)) gives back the rank-truncated original
    back = pseudo_inverse(x)
    assert np.linalg.norm(back - a) <= 1e-8 * (1 + np.linalg.norm(a))


def test_svd_completes_null_columns_orthonormally():
    # one numerically null column in C^9: every unit vector may have residual < 0.5
    rng = np.random.default_rng(0)
    for d in range(2, 10):
        a = cgauss(rng, d, d - 1) @ cgauss(rng, d - 1, d)
        dec = svd(a)
        assert np.linalg.norm(dec.u.conj().T @ dec.u - np.eye(d)) <= 1e-12 * d
        assert np.linalg.norm(dec.v.conj().T @ dec.v - np.eye(d)) <= 1e-12 * d
    z = svd(np.zeros((5, 3)))
    assert np.allclose(z.u.conj().T @ z.u, np.eye(3), atol=1e-15)
