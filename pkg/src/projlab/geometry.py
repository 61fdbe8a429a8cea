"""Dense vector primitives, orthonormal bases and subspace/affine projections.

Points are plain 1-D ``float64`` numpy arrays.  A basis is stored row-wise
so that ``basis.vectors @ x`` gives the coordinates of ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by every module."""

    ortho_tol: float = 1e-12
    active_tol: float = 1e-9
    root_tol: float = 1e-14
    equality_tol: float = 1e-8

    def __post_init__(self):
        for name in ("ortho_tol", "active_tol", "root_tol", "equality_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.root_tol > self.equality_tol:
            raise ValueError("root_tol must not exceed equality_tol")


DEFAULT_TOL = Tolerances()


class DimensionError(ValueError):
    """Raised when points or bases of different dimension are combined."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally checking its length."""
    p = np.asarray(x, dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"expected a nonempty 1-D point, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    return p


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal basis of a linear subspace of R^d (rows of ``vectors``)."""

    vectors: np.ndarray
    ambient_dim: int

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float).reshape(-1, self.ambient_dim)
        object.__setattr__(self, "vectors", v)
        if v.shape[0] > self.ambient_dim:
            raise ValueError("more basis vectors than the ambient dimension")
        if not self.is_orthonormal(1e-8):
            raise ValueError("basis vectors are not orthonormal")

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def is_orthonormal(self, tol: float = 1e-10) -> bool:
        gram = self.vectors @ self.vectors.T
        return bool(np.allclose(gram, np.eye(self.dim), atol=tol, rtol=0.0))

    def project(self, x) -> np.ndarray:
        return project_subspace(self, x)

    @classmethod
    def empty(cls, ambient_dim: int) -> "OrthoBasis":
        return cls(np.zeros((0, ambient_dim)), ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "OrthoBasis":
        return cls(np.eye(ambient_dim), ambient_dim)


def orthonormalize(vectors, tol: float | None = None, ambient_dim: int | None = None) -> OrthoBasis:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual norm falls below ``tol`` after deflation are
    dropped, so the result spans the same subspace as the input.
    ``ambient_dim`` is only needed when ``vectors`` is empty.
    """
    tol = DEFAULT_TOL.ortho_tol if tol is None else tol
    rows = [np.asarray(v, dtype=float) for v in vectors]
    if not rows:
        if ambient_dim is None:
            raise DimensionError("ambient_dim is required for an empty vector list")
        return OrthoBasis.empty(ambient_dim)
    d = rows[0].size
    if ambient_dim is not None and ambient_dim != d:
        raise DimensionError(f"vectors have dimension {d}, expected {ambient_dim}")
    if any(r.ndim != 1 or r.size != d for r in rows):
        raise DimensionError("all vectors must share one dimension")

    basis: list[np.ndarray] = []
    for v in rows:
        w = v.copy()
        scale = max(np.linalg.norm(v), 1.0)
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm < tol * scale:
            continue
        basis.append(w / nrm)
        if len(basis) == d:
            break
    return OrthoBasis(np.array(basis).reshape(-1, d), d)


def orthogonal_complement(basis: OrthoBasis, tol: float | None = None) -> OrthoBasis:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    d = basis.ambient_dim
    combined = orthonormalize(list(basis.vectors) + list(np.eye(d)), tol=tol, ambient_dim=d)
    return OrthoBasis(combined.vectors[basis.dim:], d)


def null_space(rows, ambient_dim: int, tol: float | None = None) -> OrthoBasis:
    """Orthonormal basis of ``{x : r @ x = 0 for every row r}``."""
    return orthogonal_complement(orthonormalize(list(rows), tol=tol, ambient_dim=ambient_dim), tol=tol)


def safe_norm(v) -> float:
    """Euclidean norm that neither underflows nor overflows for extreme scales."""
    v = np.asarray(v, dtype=float)
    m = float(np.abs(v).max()) if v.size else 0.0
    if m == 0.0 or not np.isfinite(m):
        return m
    return m * float(np.sqrt(np.sum((v / m) ** 2)))


def project_subspace(basis: OrthoBasis, x) -> np.ndarray:
    x = as_point(x, basis.ambient_dim)
    if basis.dim == 0:
        return np.zeros_like(x)
    return basis.vectors.T @ (basis.vectors @ x)


def project_affine(basis: OrthoBasis, offset, x) -> np.ndarray:
    offset = as_point(offset, basis.ambient_dim)
    x = as_point(x, basis.ambient_dim)
    return offset + project_subspace(basis, x - offset)
