"""Projection operators for every supported set class."""

from projlab.projectors.cone import PsiSolveResult, project_homogenized_cone, psi_derivative, psi_value
from projlab.projectors.epigraph import (
    DomainError,
    EpigraphProjection,
    epigraph_residual,
    evaluate_flat,
    project_epigraph,
)
from projlab.projectors.polyhedral import (
    CapacityError,
    IterationBudgetError,
    kkt_certificate,
    project_polyhedron,
    project_polyhedron_dykstra,
    project_polyhedron_exact,
)
from projlab.projectors.relaxed import distance, project, relax
from projlab.projectors.sets import (
    MAX_ROWS,
    Affine,
    Epigraph,
    FlatFamily,
    HalfspaceSystem,
    HomogenizedCone,
    InfeasibleSystemError,
    Polyhedron,
    SetSpec,
    Subspace,
)

__all__ = [
    "Affine", "CapacityError", "DomainError", "Epigraph", "EpigraphProjection", "FlatFamily",
    "HalfspaceSystem", "HomogenizedCone", "InfeasibleSystemError", "IterationBudgetError",
    "MAX_ROWS", "Polyhedron", "PsiSolveResult", "SetSpec", "Subspace", "distance",
    "epigraph_residual", "evaluate_flat", "kkt_certificate", "project", "project_epigraph",
    "project_homogenized_cone", "project_polyhedron", "project_polyhedron_dykstra",
    "project_polyhedron_exact", "psi_derivative", "psi_value", "relax",
]
