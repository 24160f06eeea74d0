"""Seeded generators of exactly commuting tuples.

Every construction commutes in exact arithmetic: diagonal tuples, polynomials
in one matrix, and block sums of such pieces. A joint-kernel tuple pads
another kind with a shared zero block, which forces a singular ``P``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidSpec
from .transforms import OperatorTuple, validate_commuting

KINDS = ("diagonal", "triangular", "polynomial-in-one", "nilpotent", "joint-kernel")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    dim: int
    n: int = 2
    seed: int = 0
    scale: float = 1.0
    conjugate: bool = False
    base_kind: str | None = None  # kind padded by joint-kernel

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if not 1 <= self.dim <= 64:
            raise InvalidSpec(f"dim {self.dim} outside [1, 64]")
        if not 1 <= self.n <= 4:
            raise InvalidSpec(f"n {self.n} outside [1, 4]")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec(f"seed {self.seed} is not a 64-bit unsigned integer")
        if not self.scale > 0:
            raise InvalidSpec(f"scale must be positive, got {self.scale}")
        if self.kind == "joint-kernel":
            if self.dim < 2 and self.base_kind is not None:
                raise InvalidSpec("joint-kernel padding around a base kind needs dim >= 2")
            if self.base_kind in ("joint-kernel",) or (
                self.base_kind is not None and self.base_kind not in KINDS
            ):
                raise InvalidSpec(f"invalid base kind {self.base_kind!r} for joint-kernel")

    def to_dict(self) -> dict:
        return asdict(self)


def _cgauss(rng, *shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) / np.sqrt(2)


def random_unitary(rng, d: int) -> np.ndarray:
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    q, r = np.linalg.qr(_cgauss(rng, d, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def _poly(m: np.ndarray, coeffs) -> np.ndarray:
    # Horner form; every term is a power of the same matrix
    out = np.zeros_like(m)
    eye = np.eye(m.shape[0], dtype=np.complex128)
    for a in reversed(coeffs):
        out = out @ m + a * eye
    return out


def _diagonal(rng, d, n):
    return [np.diag(_cgauss(rng, d)) for _ in range(n)]


def _polynomial_in_one(rng, d, n):
    m = _cgauss(rng, d, d)
    ops = []
    for _ in range(n):
        deg = int(rng.integers(1, 4))
        coeffs = _cgauss(rng, deg + 1)
        ops.append(_poly(m, coeffs))
    return ops


def _nilpotent(rng, d, n):
    nil = np.triu(_cgauss(rng, d, d), 1)
    ops = []
    for _ in range(n):
        deg = int(rng.integers(1, 4))
        coeffs = np.concatenate([[0.0], _cgauss(rng, deg)])
        ops.append(_poly(nil, coeffs))
    return ops


def _triangular(rng, d, n):
    # an upper-triangular block with repeated diagonal values, a polynomial
    # in it for the other coordinates, and an independent diagonal block
    k = max(1, (2 * d + 2) // 3) if d > 1 else 1
    palette = np.round(_cgauss(rng, max(1, k // 2)) * 2) / 2
    diag = rng.choice(palette, size=k)
    r = np.triu(_cgauss(rng, k, k), 1) + np.diag(diag)
    ops = []
    for i in range(n):
        if i == 0:
            block = r
        else:
            block = _poly(r, _cgauss(rng, int(rng.integers(1, 3)) + 1))
        rest = np.diag(_cgauss(rng, d - k))
        ops.append(_block_diag(block, rest))
    return ops


def _block_diag(a, b):
    d = a.shape[0] + b.shape[0]
    out = np.zeros((d, d), dtype=np.complex128)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0]:, a.shape[0]:] = b
    return out


_BUILDERS = {
    "diagonal": _diagonal,
    "triangular": _triangular,
    "polynomial-in-one": _polynomial_in_one,
    "nilpotent": _nilpotent,
}


def generate_operators(spec: GeneratorSpec) -> list[np.ndarray]:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    d, n = spec.dim, spec.n
    if spec.kind == "joint-kernel":
        base = spec.base_kind or KINDS[int(rng.integers(0, 4))]
        pad = 1 if d <= 3 else int(rng.integers(1, d // 2 + 1))
        if d - pad >= 1:
            inner = _BUILDERS[base](rng, d - pad, n)
            ops = [_block_diag(t, np.zeros((pad, pad))) for t in inner]
        else:
            ops = [np.zeros((d, d), dtype=np.complex128) for _ in range(n)]
    else:
        ops = _BUILDERS[spec.kind](rng, d, n)
    if spec.scale != 1.0:
        ops = [spec.scale * t for t in ops]
    if spec.conjugate:
        q = random_unitary(rng, d)
        ops = [q.conj().T @ t @ q for t in ops]
    return ops


def generate_commuting_tuple(spec: GeneratorSpec) -> OperatorTuple:
    """Build the tuple described by ``spec``; the same spec reproduces it bit for bit."""
    return validate_commuting(generate_operators(spec))


def default_corpus(
    seed: int = 42,
    count: int = 200,
    dims=range(2, 9),
    kinds=KINDS,
    n: int = 2,
) -> list[GeneratorSpec]:
    """Round-robin over kinds and dimensions with per-case seeds derived from ``seed``.

    Every other tuple is conjugated by a random unitary; joint-kernel cases
    cycle through the other kinds as their base.
    """
    dims = list(dims)
    kinds = list(kinds)
    children = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    specs = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        dim = dims[(i // len(kinds)) % len(dims)]
        base = None
        if kind == "joint-kernel" and dim >= 2:
            base = KINDS[(i // len(kinds)) % 4]
        specs.append(
            GeneratorSpec(
                kind=kind,
                dim=dim,
                n=n,
                seed=int(children[i]),
                conjugate=bool((i // len(kinds)) % 2),
                base_kind=base,
            )
        )
    return specs
