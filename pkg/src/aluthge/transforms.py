"""Joint polar decomposition, spherical and classical Aluthge transforms.

For a commuting tuple ``T = (T_1, ..., T_n)`` the column operator
``C = [T_1; ...; T_n]`` factors as ``C = V P`` with ``P = sqrt(C^H C)`` and
``V`` a partial isometry whose kernel is ``ker P``.  The spherical Aluthge
transform is ``(sqrt(P) V_1 sqrt(P), ..., sqrt(P) V_n sqrt(P))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotCommuting, TransformNotCommuting
from .linalg import as_matrix, default_tolerance, fro, svd

DEFAULT_CTOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def commutator_defect(operators: Sequence[np.ndarray]) -> float:
    """Largest ``‖T_i T_j − T_j T_i‖_F`` over pairs ``i < j``."""
    worst = 0.0
    for a, b in combinations(operators, 2):
        worst = max(worst, fro(a @ b - b @ a))
    return worst


@dataclass(frozen=True)
class OperatorTuple:
    operators: tuple
    commutator_defect: float
    ctol: float = DEFAULT_CTOL

    @property
    def n(self) -> int:
        return len(self.operators)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, i):
        return self.operators[i]

    def __len__(self):
        return len(self.operators)

    def column(self) -> np.ndarray:
        """The stacked column operator ``[T_1; ...; T_n]``."""
        return np.vstack(self.operators)

    def norm2(self) -> float:
        """``max_i ‖T_i‖₂``."""
        return max(float(np.linalg.norm(t, 2)) for t in self.operators)


def _check_shapes(operators) -> list[np.ndarray]:
    ops = [as_matrix(t) for t in operators]
    if not ops:
        raise DimensionMismatch("an operator tuple needs at least one matrix")
    d = ops[0].shape[0]
    for i, t in enumerate(ops):
        if t.shape != (d, d):
            raise DimensionMismatch(
                f"operator {i} has shape {t.shape}; expected ({d}, {d})"
            )
    return ops


def commutativity_bound(operators, ctol: float = DEFAULT_CTOL) -> float:
    return ctol * (1.0 + max(fro(t) for t in operators)) ** 2


def validate_commuting(operators, ctol: float | None = None) -> OperatorTuple:
    """Check shapes and commutativity, returning an immutable ``OperatorTuple``.

    Raises ``NotCommuting`` when the commutator defect exceeds
    ``ctol·(1 + max ‖T_i‖_F)²``.
    """
    if ctol is None:
        ctol = DEFAULT_CTOL
    ops = _check_shapes(operators)
    defect = commutator_defect(ops)
    bound = commutativity_bound(ops, ctol)
    if defect > bound:
        raise NotCommuting(defect, bound)
    return OperatorTuple(tuple(_frozen(t) for t in ops), defect, ctol)


@dataclass(frozen=True)
class JointPolar:
    p: np.ndarray
    isometries: tuple
    p_sqrt: np.ndarray
    rank: int = field(default=0)

    def projection(self) -> np.ndarray:
        """``Σ V_i^H V_i``, the orthogonal projection onto ``range(P)``."""
        return sum(v.conj().T @ v for v in self.isometries)


def joint_polar_decompose(t: OperatorTuple, tol: float | None = None) -> JointPolar:
    """Canonical joint polar decomposition ``T_i = V_i P``.

    Computed from one SVD of the stacked column ``C = U Σ W^H``: ``P = W Σ W^H``
    and ``V = U_r W_r^H`` on the ``r`` singular values above the rank
    tolerance. This gives ``V_i = T_i P^+`` with ``ker V = ker P`` exactly.
    """
    d = t.dim
    c = t.column()
    dec = svd(c)
    s = dec.singular_values
    if tol is None:
        tol = default_tolerance(c.shape, s[0])
    r = int(np.count_nonzero(s > tol))
    w = dec.v[:, :r]
    sr = s[:r]
    p = (w * sr) @ w.conj().T
    p_sqrt = (w * np.sqrt(sr)) @ w.conj().T
    v = dec.u[:, :r] @ w.conj().T
    isometries = tuple(_frozen(v[i * d:(i + 1) * d]) for i in range(t.n))
    p = (p + p.conj().T) / 2
    p_sqrt = (p_sqrt + p_sqrt.conj().T) / 2
    return JointPolar(_frozen(p), isometries, _frozen(p_sqrt), r)


def aluthge_from_polar(polar: JointPolar) -> list[np.ndarray]:
    q = polar.p_sqrt
    return [q @ v @ q for v in polar.isometries]


def spherical_aluthge(
    t: OperatorTuple, tol: float | None = None, polar: JointPolar | None = None
) -> OperatorTuple:
    """Spherical Aluthge transform; the output is re-validated as commuting."""
    if polar is None:
        polar = joint_polar_decompose(t, tol)
    hat = aluthge_from_polar(polar)
    defect = commutator_defect(hat)
    bound = commutativity_bound(hat, t.ctol)
    if defect > bound:
        raise TransformNotCommuting(
            defect,
            bound,
            f"transformed tuple is not commuting (defect {defect:.3e} > {bound:.3e}); "
            f"input defect {t.commutator_defect:.3e}, rank(P) = {polar.rank} of {t.dim}",
        )
    return OperatorTuple(tuple(_frozen(h) for h in hat), defect, t.ctol)


def classical_aluthge(a, tol: float | None = None) -> np.ndarray:
    """``|T|^{1/2} V |T|^{1/2}`` for the canonical polar decomposition ``T = V|T|``."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    dec = svd(a)
    s = dec.singular_values
    if tol is None:
        tol = default_tolerance(a.shape, s[0])
    r = int(np.count_nonzero(s > tol))
    w = dec.v[:, :r]
    root = (w * np.sqrt(s[:r])) @ w.conj().T
    v = dec.u[:, :r] @ w.conj().T
    return root @ v @ root


@dataclass(frozen=True)
class CrissCrossReport:
    commuting: bool
    defect: float
    bound: float


def _pair_shapes(a, b):
    a = [as_matrix(x) for x in a]
    b = [as_matrix(x) for x in b]
    if len(a) != len(b) or not a:
        raise DimensionMismatch(f"tuple lengths differ: {len(a)} vs {len(b)}")
    shape = a[0].shape
    if shape[0] != shape[1] or any(x.shape != shape for x in a + b):
        raise DimensionMismatch("criss-cross tuples need square matrices of one size")
    return a, b


def is_crisscross_commuting(a, b, tol: float = 1e-10) -> CrissCrossReport:
    """Test ``A_i B_j A_k = A_k B_j A_i`` and ``B_i A_j B_k = B_k A_j B_i`` for all i, j, k.

    Neither tuple needs to commute. The defect bound is ``tol·(1 + m)³`` with
    ``m`` the largest Frobenius norm among the ``A_i`` and ``B_i``.
    """
    a, b = _pair_shapes(a, b)
    n = len(a)
    worst = 0.0
    for x, y in ((a, b), (b, a)):
        for i in range(n):
            for k in range(i + 1, n):
                for j in range(n):
                    worst = max(worst, fro(x[i] @ y[j] @ x[k] - x[k] @ y[j] @ x[i]))
    m = max(fro(x) for x in a + b)
    bound = tol * (1.0 + m) ** 3
    return CrissCrossReport(worst <= bound, worst, bound)


def canonical_crisscross_pair(t: OperatorTuple, polar: JointPolar | None = None):
    """``A = (√P, ..., √P)`` and ``B = (V_1 √P, ..., V_n √P)``; then ``AB = T̂`` and ``BA = T``."""
    if polar is None:
        polar = joint_polar_decompose(t)
    a = [polar.p_sqrt] * t.n
    b = [v @ polar.p_sqrt for v in polar.isometries]
    return a, b
