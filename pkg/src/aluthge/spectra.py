"""Joint eigenvalues, Taylor spectra and the spectrum comparisons.

For commuting matrices the Taylor spectrum is the finite set of joint
eigenvalues. They are found from a complex Schur form of a random
combination ``M = Σ c_i T_i``. The eigenvalues of ``M`` are grouped into
clusters. Each cluster's invariant subspace is invariant under every ``T_i``,
and the joint eigenvalue is the trace of ``T_i`` compressed to that subspace,
divided by its dimension. Averaging over a whole cluster keeps defective
eigenvalues accurate to working precision even though each computed
eigenvalue is perturbed by roughly ``eps**(1/m)``. Every point is then
certified by a nonzero Koszul homology profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.spatial.distance import pdist
from scipy.linalg import schur
from scipy.linalg.lapack import ztrsen

from .errors import (
    CertificationFailure,
    NotCrissCross,
    NotCommuting,
    ProductNotCommuting,
    TriangularizationFailure,
)
from .koszul import (
    HomologyProfile,
    build_koszul,
    homology_at,
    homology_dimensions,
    is_left_invertible,
    is_taylor_invertible_at,
    rank_tolerance,
)
from .linalg import singular_values
from .linalg import EPS, numerical_rank
from .transforms import (
    OperatorTuple,
    is_crisscross_commuting,
    joint_polar_decompose,
    spherical_aluthge,
    validate_commuting,
)

MAX_RETRIES = 8
RESIDUAL_TOL = 1e-8
POLYDISC_SLACK = 1e-8
CERT_FACTOR = 100.0


@dataclass(frozen=True)
class JointSpectrum:
    points: tuple  # tuples of complex, one per joint eigenvalue
    multiplicities: tuple
    polydisc_radii: tuple
    homology_profiles: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.polydisc_radii)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=np.complex128).reshape(len(self.points), self.n)

    def polydisc_excess(self) -> float:
        """Largest ``|p_i| − r_i − slack·(1 + r_i)``; nonpositive means contained."""
        worst = -np.inf
        for p in self.points:
            for z, r in zip(p, self.polydisc_radii):
                worst = max(worst, abs(z) - r - POLYDISC_SLACK * (1.0 + r))
        return float(worst)


@dataclass(frozen=True)
class SpectrumComparison:
    left: JointSpectrum
    right: JointSpectrum
    matched: bool
    hausdorff_distance: float
    delta: float
    unmatched_points: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# clustering


def _cluster_threshold(size: int, norm: float, noise: float) -> float:
    # a defective eigenvalue of multiplicity m moved by a perturbation of size
    # noise spreads to about norm^((m-1)/m) · noise^(1/m)
    big = max(norm, noise)
    return big ** ((size - 1) / size) * noise ** (1.0 / size)


def cluster_eigenvalues(values, norm: float, ref_scale: float = 0.0) -> list[list[int]]:
    """Group computed eigenvalues that are perturbations of one exact eigenvalue.

    ``norm`` is the norm of the matrix the values came from and ``ref_scale``
    the norm that sets its absolute rounding level (a matrix derived from a
    larger one carries that one's rounding). The single-linkage dendrogram is
    walked top down, and a subtree is kept whole when all of its members lie
    within the spread expected for a defective eigenvalue of that multiplicity.
    """
    values = np.asarray(values, dtype=np.complex128)
    m = len(values)
    if m == 1:
        return [[0]]
    noise = max(100.0 * m * EPS * max(norm, ref_scale), np.finfo(float).tiny)
    pts = np.column_stack([values.real, values.imag])
    root = to_tree(linkage(pdist(pts), method="single"))

    clusters = []
    stack = [root]
    while stack:
        node = stack.pop()
        idx = node.pre_order()
        if len(idx) == 1:
            clusters.append(idx)
            continue
        center = values[idx].mean()
        radius = np.max(np.abs(values[idx] - center))
        if radius <= _cluster_threshold(len(idx), norm, noise):
            clusters.append(sorted(idx))
        else:
            stack.extend([node.get_right(), node.get_left()])
    return sorted(clusters)


def _cluster_means(values, norm, ref_scale):
    values = np.asarray(values)
    return [values[c].mean() for c in cluster_eigenvalues(values, norm, ref_scale)]


def eigenvalues(a, ref_scale: float = 0.0) -> np.ndarray:
    """Eigenvalues of one matrix, with defective clusters replaced by their mean."""
    a = np.asarray(a, dtype=np.complex128)
    r, _ = schur(a, output="complex")
    diag = np.diag(r)
    out = []
    for c in cluster_eigenvalues(diag, float(np.linalg.norm(a)), ref_scale):
        out.extend([diag[c].mean()] * len(c))
    return np.array(out)


def spectral_radius(a, ref_scale: float = 0.0) -> float:
    a = np.asarray(a, dtype=np.complex128)
    r, _ = schur(a, output="complex")
    means = _cluster_means(np.diag(r), float(np.linalg.norm(a)), ref_scale)
    return float(max(abs(z) for z in means))


# ---------------------------------------------------------------------------
# joint eigenvalues


def _random_direction(rng, n):
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return c / np.linalg.norm(c)


def certification_profile(t, point, tol: float | None = None, ref_scale: float = 0.0) -> HomologyProfile:
    """Koszul homology at a candidate point, with the certification tolerance.

    Computed joint eigenvalues are accurate to a modest multiple of
    ``eps·‖T‖``, so the default rank tolerance is widened by ``CERT_FACTOR``.
    """
    k = build_koszul(t, point)
    if tol is None:
        tol = rank_tolerance(k, [singular_values(b) for b in k.boundaries], ref_scale, CERT_FACTOR)
    return homology_dimensions(k, tol)


def _attempt(ops, c, ref_scale):
    """One triangularization attempt; returns (points, sizes, residual) or None."""
    d = ops[0].shape[0]
    m = sum(ci * t for ci, t in zip(c, ops))
    r, z = schur(m, output="complex")
    diag = np.diag(r)
    clusters = cluster_eigenvalues(diag, float(np.linalg.norm(m)), ref_scale)
    points, sizes = [], []
    worst = 0.0
    for cl in clusters:
        select = np.zeros(d, dtype=np.int32)
        select[cl] = 1
        if len(cl) == d:
            q = z
        else:
            _, qs, _, k, _, _, info = ztrsen(select, r, z, job="N")
            if info != 0 or k != len(cl):
                return None
            q = qs[:, : len(cl)]
        coords = []
        for t in ops:
            tq = t @ q
            comp = q.conj().T @ tq
            worst = max(worst, float(np.linalg.norm(tq - q @ comp)))
            coords.append(complex(np.trace(comp) / len(cl)))
        points.append(tuple(coords))
        sizes.append(len(cl))
    return points, sizes, worst


def _merge_points(points, sizes, delta):
    merged_pts, merged_mult = [], []
    for p, s in zip(points, sizes):
        arr = np.array(p)
        for j, q in enumerate(merged_pts):
            if np.linalg.norm(arr - np.array(q)) <= delta:
                merged_mult[j] += s
                break
        else:
            merged_pts.append(p)
            merged_mult.append(s)
    order = sorted(
        range(len(merged_pts)),
        key=lambda j: tuple(x for z in merged_pts[j] for x in (round(z.real, 9), round(z.imag, 9))),
    )
    return [merged_pts[j] for j in order], [merged_mult[j] for j in order]


def matching_delta(scale: float) -> float:
    return 1e-6 * (1.0 + scale)


def reference_scale(t: OperatorTuple) -> float:
    """Frobenius norm of the stacked column, the size of the rounding in ``t``."""
    return float(np.linalg.norm(t.column()))


def _joint_spectrum(t: OperatorTuple, seed: int, tol: float | None, ref_scale: float):
    ops = list(t)
    ref_scale = max(ref_scale, reference_scale(t))
    scale = 1.0 + ref_scale
    delta = matching_delta(max(t.norm2(), ref_scale))
    rng = np.random.default_rng(seed)
    reason = "no attempt made"
    for _ in range(MAX_RETRIES + 1):
        c = _random_direction(rng, len(ops))
        res = _attempt(ops, c, ref_scale)
        if res is None:
            reason = "invariant subspace reordering failed"
            continue
        points, sizes, worst = res
        if worst > RESIDUAL_TOL * scale:
            reason = f"invariance residual {worst:.3e} above {RESIDUAL_TOL * scale:.3e}"
            continue
        points, mults = _merge_points(points, sizes, delta)
        profiles = [certification_profile(t, p, tol, ref_scale) for p in points]
        bad = [p for p, h in zip(points, profiles) if h.is_exact]
        if bad:
            reason = f"certification failed at {bad[0]} (Koszul complex is exact there)"
            continue
        radii = tuple(spectral_radius(x, ref_scale) for x in ops)
        return JointSpectrum(tuple(points), tuple(mults), radii, tuple(profiles))
    if reason.startswith("certification"):
        raise CertificationFailure(reason)
    raise TriangularizationFailure(
        f"simultaneous triangularization failed after {MAX_RETRIES} retries: {reason} "
        f"(commutator defect {t.commutator_defect:.3e})"
    )


def joint_eigenvalues(
    t: OperatorTuple, seed: int = 0, tol: float | None = None, ref_scale: float = 0.0
) -> JointSpectrum:
    """Joint eigenvalues with multiplicities (summing to the dimension)."""
    spec = _joint_spectrum(t, seed, tol, ref_scale)
    return JointSpectrum(spec.points, spec.multiplicities, spec.polydisc_radii, None)


def taylor_spectrum(
    t: OperatorTuple, seed: int = 0, tol: float | None = None, ref_scale: float = 0.0
) -> JointSpectrum:
    """Joint eigenvalues certified by Koszul homology and checked against the polydisc.

    ``ref_scale`` sets the rounding floor for tuples derived from a larger
    one, such as a spherical Aluthge transform.
    """
    spec = _joint_spectrum(t, seed, tol, ref_scale)
    excess = spec.polydisc_excess()
    if excess > 0:
        raise CertificationFailure(
            f"spectrum leaves the polydisc of radii {spec.polydisc_radii} by {excess:.3e}"
        )
    return spec


# ---------------------------------------------------------------------------
# comparisons


def hausdorff(left, right) -> float:
    a = np.asarray(left, dtype=np.complex128)
    b = np.asarray(right, dtype=np.complex128)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return float("inf")
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _unmatched(left, right, delta):
    out = []
    for src, dst in ((left, right), (right, left)):
        for p in src:
            if not dst or min(np.linalg.norm(np.array(p) - np.array(q)) for q in dst) > delta:
                out.append(p)
    return out


def compare_point_sets(left: JointSpectrum, right: JointSpectrum, delta: float) -> SpectrumComparison:
    dist = hausdorff(left.as_array(), right.as_array())
    return SpectrumComparison(
        left, right, dist <= delta, dist, delta, _unmatched(left.points, right.points, delta)
    )


def compare_taylor_spectra(
    t: OperatorTuple, seed: int = 0, tol: float | None = None, hat: OperatorTuple | None = None
) -> SpectrumComparison:
    """Compare ``σ_T(T)`` with ``σ_T(T̂)`` as sets (multiplicities are not compared)."""
    if hat is None:
        hat = spherical_aluthge(t, tol)
    ref = reference_scale(t)
    left = taylor_spectrum(t, seed, tol, ref)
    right = taylor_spectrum(hat, seed, tol, ref)
    delta = matching_delta(max(t.norm2(), hat.norm2()))
    return compare_point_sets(left, right, delta)


def _drop_origin(spec: JointSpectrum, radius: float) -> JointSpectrum:
    keep = [j for j, p in enumerate(spec.points) if np.linalg.norm(np.array(p)) > radius]
    return JointSpectrum(
        tuple(spec.points[j] for j in keep),
        tuple(spec.multiplicities[j] for j in keep),
        spec.polydisc_radii,
        None if spec.homology_profiles is None else tuple(spec.homology_profiles[j] for j in keep),
    )


def crisscross_spectrum_check(
    a, b, seed: int = 0, tol: float | None = None, cross_tol: float = 1e-10, ctol: float | None = None
) -> SpectrumComparison:
    """Compare ``σ_T(AB) \\ {0}`` with ``σ_T(BA) \\ {0}`` for criss-cross commuting tuples.

    Points within ``1e-8·(1 + scale)`` of the origin are removed before matching.
    """
    report = is_crisscross_commuting(a, b, cross_tol)
    if not report.commuting:
        raise NotCrissCross(
            f"tuples do not criss-cross commute: defect {report.defect:.3e} > {report.bound:.3e}"
        )
    try:
        ab = validate_commuting([x @ y for x, y in zip(a, b)], ctol)
        ba = validate_commuting([y @ x for x, y in zip(a, b)], ctol)
    except NotCommuting as exc:
        raise ProductNotCommuting(str(exc)) from exc
    scale = max(ab.norm2(), ba.norm2())
    rho = 1e-8 * (1.0 + scale)
    ref = max(reference_scale(ab), reference_scale(ba))
    left = _drop_origin(taylor_spectrum(ab, seed, tol, ref), rho)
    right = _drop_origin(taylor_spectrum(ba, seed, tol, ref), rho)
    return compare_point_sets(left, right, matching_delta(scale))


# ---------------------------------------------------------------------------
# theorem checks


@dataclass(frozen=True)
class Verdict:
    passed: bool
    vacuous: bool
    details: dict


def verify_theorem_basic(t: OperatorTuple, tol: float | None = None, hat: OperatorTuple | None = None) -> Verdict:
    """Left invertibility of ``T`` or ``T̂`` must force ``rank(P) = d``."""
    polar = joint_polar_decompose(t, tol)
    if hat is None:
        hat = spherical_aluthge(t, tol, polar)
    ref = reference_scale(t)
    left_t = is_left_invertible(t, tol)
    left_hat = is_left_invertible(hat, tol, ref)
    rank_p = numerical_rank(polar.p, tol)
    hypothesis = left_t or left_hat
    passed = (not hypothesis) or rank_p == t.dim
    return Verdict(
        passed,
        not hypothesis,
        {"left_invertible_T": left_t, "left_invertible_hat": left_hat, "rank_P": rank_p, "dim": t.dim},
    )


def verify_origin_equivalence(
    t: OperatorTuple, tol: float | None = None, hat: OperatorTuple | None = None
) -> Verdict:
    """``T`` is Taylor invertible at the origin exactly when ``T̂`` is."""
    if hat is None:
        hat = spherical_aluthge(t, tol)
    inv_t = is_taylor_invertible_at(t, None, tol)
    inv_hat = is_taylor_invertible_at(hat, None, tol, reference_scale(t))
    return Verdict(inv_t == inv_hat, False, {"invertible_T": inv_t, "invertible_hat": inv_hat})


def exterior_points(spec: JointSpectrum, count: int, rng, min_distance: float) -> list[tuple]:
    """Random points of an enlarged polydisc lying at least ``min_distance`` from the spectrum."""
    pts = spec.as_array()
    radii = np.array(spec.polydisc_radii) + 1.0 + 3.0 * min_distance
    out = []
    while len(out) < count:
        mod = radii * np.sqrt(rng.uniform(size=len(radii)))
        z = mod * np.exp(2j * np.pi * rng.uniform(size=len(radii)))
        if pts.size and np.min(np.linalg.norm(pts - z, axis=1)) <= min_distance:
            continue
        out.append(tuple(complex(x) for x in z))
    return out


def certify_exterior(
    t: OperatorTuple, spec: JointSpectrum, rng, count: int = 20, min_distance=None, tol=None, ref_scale=0.0
):
    """Certification profiles at random points away from the spectrum; all should be exact."""
    if min_distance is None:
        min_distance = exterior_margin(t.norm2())
    pts = exterior_points(spec, count, rng, min_distance)
    return [(p, certification_profile(t, p, tol, ref_scale)) for p in pts]


def exterior_margin(scale: float) -> float:
    # pseudospectral radius of a defective cluster is far larger than delta
    return max(10 * matching_delta(scale), 0.05 * (1.0 + scale))


__all__ = [
    "HomologyProfile",
    "JointSpectrum",
    "SpectrumComparison",
    "Verdict",
    "cluster_eigenvalues",
    "compare_point_sets",
    "compare_taylor_spectra",
    "crisscross_spectrum_check",
    "certify_exterior",
    "eigenvalues",
    "exterior_points",
    "hausdorff",
    "joint_eigenvalues",
    "spectral_radius",
    "taylor_spectrum",
    "verify_origin_equivalence",
    "verify_theorem_basic",
]
