"""Projection dispatch over set variants and the relaxed projector."""

from __future__ import annotations

import numpy as np

from projlab.geometry import DEFAULT_TOL, DimensionError, Tolerances, as_point, project_affine, project_subspace
from projlab.projectors.cone import project_homogenized_cone
from projlab.projectors.epigraph import project_epigraph
from projlab.projectors.polyhedral import project_polyhedron
from projlab.projectors.sets import Affine, Epigraph, HomogenizedCone, Polyhedron, Subspace


def project(spec, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Nearest point of the set described by ``spec``."""
    x = as_point(x)
    if x.size != spec.dim:
        raise DimensionError(f"point has dimension {x.size}, set lives in R^{spec.dim}")
    if isinstance(spec, Subspace):
        return project_subspace(spec.basis, x)
    if isinstance(spec, Affine):
        return project_affine(spec.basis, spec.offset, x)
    if isinstance(spec, Polyhedron):
        return project_polyhedron(spec.system, x, tol)[0]
    if isinstance(spec, Epigraph):
        px, pt, _ = project_epigraph(spec.family, x[0], x[1], tol)
        return np.array([px, pt])
    if isinstance(spec, HomogenizedCone):
        return project_homogenized_cone(spec.family, x, tol).projected
    raise TypeError(f"unsupported set description {type(spec).__name__}")


def relax(spec, lam: float, x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``(1 - lam) x + lam P(x)`` for ``lam`` in ``]0, 2]``."""
    if not 0 < lam <= 2:
        raise ValueError(f"relaxation parameter {lam!r} outside ]0, 2]")
    x = as_point(x)
    p = project(spec, x, tol)
    if lam == 1:
        return p
    return (1.0 - lam) * x + lam * p


def distance(spec, x, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(np.linalg.norm(as_point(x) - project(spec, x, tol)))
