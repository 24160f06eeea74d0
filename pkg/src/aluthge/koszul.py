"""Koszul complexes of commuting tuples and their homology dimensions.

The degree-k chain space is ``H ⊗ Λ^k C^n`` with the exterior basis indexed
by lexicographically ordered k-subsets of ``{0, ..., n-1}``. The boundary
``D_k`` sends ``x ⊗ e_S`` to ``Σ_i (T_i − λ_i) x ⊗ e_i ∧ e_S``, where
``e_i ∧ e_S = (−1)^{#{s in S : s < i}} e_{S ∪ {i}}``. For ``n = 2`` this gives
``D_0 = [T_1; T_2]`` and ``D_1 = [−T_2, T_1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IndexAnomalous, KOutOfRange
from .linalg import EPS, singular_values
from .transforms import OperatorTuple


@dataclass(frozen=True)
class KoszulComplexRep:
    n: int
    d: int
    point: tuple
    boundaries: tuple  # D_0, ..., D_{n-1}


@dataclass(frozen=True)
class HomologyProfile:
    dims: tuple  # h_0, ..., h_n
    ranks: tuple  # rank D_0, ..., rank D_{n-1}
    tol_used: float

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * h for k, h in enumerate(self.dims))

    @property
    def is_exact(self) -> bool:
        return not any(self.dims)


def exterior_basis(n: int, k: int) -> list[tuple]:
    return list(combinations(range(n), k))


def _as_point(point, n) -> tuple:
    if point is None:
        return (0j,) * n
    pt = tuple(complex(z) for z in np.atleast_1d(point))
    if len(pt) != n:
        raise DimensionMismatch(f"point has {len(pt)} coordinates; tuple has length {n}")
    return pt


def build_koszul(t: OperatorTuple | Sequence, point=None) -> KoszulComplexRep:
    """Boundary matrices of the Koszul complex of ``T − λ``."""
    ops = list(t)
    n = len(ops)
    d = ops[0].shape[0]
    lam = _as_point(point, n)
    eye = np.eye(d, dtype=np.complex128)
    shifted = [np.asarray(op, dtype=np.complex128) - lam[i] * eye for i, op in enumerate(ops)]
    boundaries = []
    for k in range(n):
        src = exterior_basis(n, k)
        dst = {s: j for j, s in enumerate(exterior_basis(n, k + 1))}
        dk = np.zeros((d * len(dst), d * len(src)), dtype=np.complex128)
        for col, subset in enumerate(src):
            for i in range(n):
                if i in subset:
                    continue
                sign = -1.0 if sum(s < i for s in subset) % 2 else 1.0
                row = dst[tuple(sorted(subset + (i,)))]
                block = shifted[i] if sign > 0 else -shifted[i]
                dk[row * d:(row + 1) * d, col * d:(col + 1) * d] = block
        boundaries.append(dk)
    return KoszulComplexRep(n, d, lam, tuple(boundaries))


def rank_tolerance(k: KoszulComplexRep, svals, ref_scale: float = 0.0, factor: float = 1.0) -> float:
    """``factor·max(rows, cols)·eps·max(σ_max, ref_scale)`` over all boundaries.

    ``ref_scale`` is a floor for tuples whose entries carry absolute error
    inherited from a larger tuple (a transform of ``T`` is accurate only to
    about ``eps·‖T‖``).
    """
    shape = max(max(b.shape) for b in k.boundaries)
    smax = max(float(s[0]) for s in svals)
    return factor * shape * EPS * max(smax, ref_scale)


def homology_dimensions(
    k: KoszulComplexRep, tol: float | None = None, ref_scale: float = 0.0
) -> HomologyProfile:
    """Homology dimensions by rank arithmetic, with one tolerance for every ``D_k``.

    The default tolerance is ``max(rows, cols)·eps·σ_max`` taken over all the
    boundary matrices, so ranks stay mutually consistent.
    """
    svals = [singular_values(b) for b in k.boundaries]
    if tol is None:
        tol = rank_tolerance(k, svals, ref_scale)
    ranks = [int(np.count_nonzero(s > tol)) for s in svals]
    dims = []
    for j in range(k.n + 1):
        r_out = ranks[j] if j < k.n else 0
        r_in = ranks[j - 1] if j > 0 else 0
        dims.append(k.d * comb(k.n, j) - r_out - r_in)
    return HomologyProfile(tuple(dims), tuple(ranks), float(tol))


def homology_at(t, point=None, tol: float | None = None, ref_scale: float = 0.0) -> HomologyProfile:
    return homology_dimensions(build_koszul(t, point), tol, ref_scale)


def is_taylor_invertible_at(t, point=None, tol: float | None = None, ref_scale: float = 0.0) -> bool:
    """True iff the Koszul complex of ``T − λ`` is exact."""
    return homology_at(t, point, tol, ref_scale).is_exact


def is_left_invertible(t, tol: float | None = None, ref_scale: float = 0.0) -> bool:
    """Exactness at the left end at ``λ = 0``: the column ``[T_1; ...; T_n]`` is injective."""
    return homology_at(t, None, tol, ref_scale).dims[0] == 0


def fredholm_index_at(t, point=None, tol: float | None = None, ref_scale: float = 0.0) -> int:
    """Alternating sum of homology dimensions, which must vanish in finite dimensions.

    Raises ``IndexAnomalous`` when the ranks are inconsistent (a negative
    homology dimension or a nonzero index).
    """
    prof = homology_at(t, point, tol, ref_scale)
    index = prof.euler_characteristic
    if index != 0 or min(prof.dims) < 0:
        raise IndexAnomalous(
            f"anomalous Koszul homology {prof.dims} (ranks {prof.ranks}, tol {prof.tol_used:.3e})"
        )
    return index


def slodkowski_left_k_member(t, point, k: int, tol: float | None = None, ref_scale: float = 0.0) -> bool:
    """Membership of ``λ`` in the left k-spectrum: some ``h_j ≠ 0`` with ``j ≤ k``."""
    n = len(t)
    if not 0 <= k <= n:
        raise KOutOfRange(f"k = {k} outside [0, {n}]")
    prof = homology_at(t, point, tol, ref_scale)
    return any(prof.dims[: k + 1])
