"""Dense complex linear algebra kernels.

Hermitian eigendecomposition uses the cyclic two-sided Jacobi method and the
SVD uses one-sided (Hestenes) Jacobi on the columns. Both kernels are compiled
with numba; sweep order is fixed so results are reproducible bit for bit.
Matrices are plain ``complex128`` numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConvergenceFailure, NotHermitian, NotPsd, NotSquare

EPS = np.finfo(np.float64).eps
MAX_SWEEPS = 80


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (a copy is not forced)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def fro(a) -> float:
    return float(np.linalg.norm(a))


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, ascending
    vectors: np.ndarray  # columns are orthonormal eigenvectors


@dataclass(frozen=True)
class SvdDecomposition:
    u: np.ndarray  # m x k, orthonormal columns
    singular_values: np.ndarray  # k = min(m, n), descending
    v: np.ndarray  # n x k, orthonormal columns

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.v.conj().T


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True)
def _rotation(app, aqq, apq):
    # Unitary G = [[c, s*e], [-s*conj(e), c]] with G^H [[app, apq], [conj(apq), aqq]] G diagonal.
    mag = abs(apq)
    e = apq / mag
    zeta = (aqq - app) / (2.0 * mag)
    if zeta >= 0.0:
        t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
    else:
        t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = c * t
    return c, s, e


@njit(cache=True)
def _jacobi_eigh(a, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    norm = np.sqrt(np.sum(np.abs(a) ** 2))
    if norm == 0.0:
        return np.zeros(n), v, 0
    thresh = 2.220446049250313e-16 * norm / n
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                c, s, e = _rotation(a[p, p].real, a[q, q].real, apq)
                se = s * e
                sec = s * np.conj(e)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sec * akq
                    a[k, q] = se * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - se * aqk
                    a[q, k] = sec * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - sec * vkq
                    v[k, q] = se * vkp + c * vkq
        if not rotated:
            w = np.empty(n)
            for i in range(n):
                w[i] = a[i, i].real
            return w, v, sweep
    return np.zeros(n), v, -1


@njit(cache=True)
def _one_sided_jacobi(a, want_v, max_sweeps):
    # Orthogonalizes the columns of a (m >= n) in place; returns (a, v, sweeps).
    # Pairs count as orthogonal once |<a_p, a_q>| <= m·eps·|a_p||a_q|; a bare
    # eps bound is not reachable under rounding and can cycle forever.
    m, n = a.shape
    v = np.eye(n, dtype=np.complex128)
    # columns below this norm are rounding noise; rotating them never settles
    floor = np.sqrt(m) * 2.220446049250313e-16 * np.sqrt(np.sum(np.abs(a) ** 2))
    floor2 = floor * floor
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0 + 0.0j
                for k in range(m):
                    ap = a[k, p]
                    aq = a[k, q]
                    alpha += ap.real * ap.real + ap.imag * ap.imag
                    beta += aq.real * aq.real + aq.imag * aq.imag
                    gamma += np.conj(ap) * aq
                if alpha <= floor2 or beta <= floor2:
                    continue
                if abs(gamma) <= m * 2.220446049250313e-16 * np.sqrt(alpha * beta):
                    continue
                rotated = True
                c, s, e = _rotation(alpha, beta, gamma)
                se = s * e
                sec = s * np.conj(e)
                for k in range(m):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - sec * akq
                    a[k, q] = se * akp + c * akq
                if want_v:
                    for k in range(n):
                        vkp = v[k, p]
                        vkq = v[k, q]
                        v[k, p] = c * vkp - sec * vkq
                        v[k, q] = se * vkp + c * vkq
        if not rotated:
            return a, v, sweep
    return a, v, -1


# ---------------------------------------------------------------------------
# public operations


def hermitian_eigendecompose(a) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(a + a^H) / 2`` first. Eigenvalues come back
    in ascending order with the matching eigenvectors as columns.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {a.shape}")
    asym = fro(a - a.conj().T)
    if asym > 1e-10 * (1.0 + fro(a)):
        raise NotHermitian(f"matrix is not Hermitian (skew part {asym:.3e})")
    h = np.ascontiguousarray((a + a.conj().T) / 2)
    w, v, sweeps = _jacobi_eigh(h, MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceFailure(f"Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps")
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def _complete_orthonormal(u, good):
    # Replace the columns of u not flagged ``good`` by an orthonormal completion.
    # Each new column is the standard basis vector with the largest residual
    # after projecting out the current basis; its squared norm is at least
    # (m - len(basis)) / m, so the choice is always well conditioned.
    m, k = u.shape
    basis = [u[:, j] for j in range(k) if good[j]]
    out = u.copy()
    for j in range(k):
        if good[j]:
            continue
        w = np.eye(m, dtype=np.complex128)
        for _ in range(2):
            for b in basis:
                w -= np.outer(b, b.conj() @ w)
        norms = np.linalg.norm(w, axis=0)
        best = int(np.argmax(norms))
        col = w[:, best] / norms[best]
        basis.append(col)
        out[:, j] = col
    return out


def _svd_tall(a: np.ndarray, want_vectors: bool):
    m, n = a.shape
    work, v, sweeps = _one_sided_jacobi(np.ascontiguousarray(a.copy()), want_vectors, MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceFailure(f"one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")
    s = np.sqrt(np.sum(np.abs(work) ** 2, axis=0))
    order = np.argsort(-s, kind="stable")
    s = s[order]
    if not want_vectors:
        return None, s, None
    work = work[:, order]
    v = v[:, order]
    smax = s[0] if n else 0.0
    good = s > max(m, n) * EPS * smax
    u = np.zeros((m, n), dtype=np.complex128)
    u[:, good] = work[:, good] / s[good]
    if not np.all(good):
        u = _complete_orthonormal(u, good)
    return u, s, v


def svd(a) -> SvdDecomposition:
    """Thin SVD ``a = u diag(s) v^H`` with singular values descending."""
    a = as_matrix(a)
    m, n = a.shape
    if m >= n:
        u, s, v = _svd_tall(a, True)
        return SvdDecomposition(u, s, v)
    u, s, v = _svd_tall(a.conj().T, True)
    return SvdDecomposition(v, s, u)


def singular_values(a) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        a = a.conj().T
    return _svd_tall(a, False)[1]


def default_tolerance(shape, smax: float) -> float:
    return max(shape) * EPS * smax


def numerical_rank(a, tol: float | None = None) -> int:
    """Count singular values strictly above ``tol`` (default ``max(m,n)·eps·σ_max``)."""
    a = as_matrix(a)
    s = singular_values(a)
    if tol is None:
        tol = default_tolerance(a.shape, s[0])
    return int(np.count_nonzero(s > tol))


def psd_sqrt(a) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues down to ``-1e-10·‖a‖_F`` are clamped to 0."""
    a = as_matrix(a)
    eig = hermitian_eigendecompose(a)
    floor = -1e-10 * fro(a)
    if eig.eigenvalues.size and eig.eigenvalues[0] < floor:
        raise NotPsd(f"matrix has eigenvalue {eig.eigenvalues[0]:.3e} below {floor:.3e}")
    root = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    s = (eig.vectors * root) @ eig.vectors.conj().T
    return (s + s.conj().T) / 2


def pseudo_inverse(a, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudo-inverse; singular values ``<= tol`` are treated as zero."""
    dec = svd(a)
    s = dec.singular_values
    if tol is None:
        tol = default_tolerance(np.shape(a), s[0])
    keep = s > tol
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (dec.v * inv) @ dec.u.conj().T
