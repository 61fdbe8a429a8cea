"""Face machinery for polyhedra ``{x : A x <= beta}``.

A nonempty face is identified with its canonical active set: the rows tight
on the whole face.  For a point ``c`` of the polyhedron, the rows tight at
``c`` are exactly the canonical active set of the minimal face containing
``c``, and ``c`` lies in the relative interior of that face.  Relative
interior membership is therefore decided by active-set equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from projlab.geometry import (
    DEFAULT_TOL,
    OrthoBasis,
    Tolerances,
    as_point,
    null_space,
    orthogonal_complement,
    orthonormalize,
    project_affine,
    project_subspace,
)
from projlab.projectors import MAX_ROWS, CapacityError, HalfspaceSystem, project_polyhedron


class NotInSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FaceDescriptor:
    """A face given by its canonical active set and its affine hull.

    ``aff F = offset + span(basis)``; for faces of cones ``offset`` is 0 and
    ``basis`` spans ``span F``.  ``relint_point`` is a witness strictly
    satisfying every inactive row.
    """

    active_set: tuple[int, ...]
    basis: OrthoBasis
    offset: np.ndarray
    relint_point: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    def project_hull(self, x) -> np.ndarray:
        return project_affine(self.basis, self.offset, x)

    def __eq__(self, other):
        return isinstance(other, FaceDescriptor) and self.active_set == other.active_set

    def __hash__(self):
        return hash(self.active_set)


@dataclass(frozen=True)
class FaceLattice:
    system: HalfspaceSystem
    faces: list[FaceDescriptor] = field(default_factory=list)

    def __len__(self):
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def index(self, active_set) -> int | None:
        key = tuple(sorted(active_set))
        for i, face in enumerate(self.faces):
            if face.active_set == key:
                return i
        return None


def _scale(sys: HalfspaceSystem, c: np.ndarray) -> float:
    b = np.abs(sys.beta).max() if sys.n_rows else 0.0
    return max(1.0, float(np.linalg.norm(c)), float(b))


def _hull(sys: HalfspaceSystem, S: tuple[int, ...], tol: Tolerances) -> tuple[OrthoBasis, np.ndarray]:
    d = sys.dim
    if not S:
        return OrthoBasis.full(d), np.zeros(d)
    AS = sys.A[list(S)]
    basis = null_space(AS, d, tol.ortho_tol)
    if sys.is_cone:
        offset = np.zeros(d)
    else:
        offset = np.linalg.lstsq(AS, sys.beta[list(S)], rcond=None)[0]
    return basis, offset


def identify_face(sys: HalfspaceSystem, c, tol: Tolerances = DEFAULT_TOL) -> FaceDescriptor:
    """The minimal face ``F_c``, i.e. the unique face with ``c`` in its relative interior."""
    c = as_point(c, sys.dim)
    eps = tol.active_tol * _scale(sys, c)
    if sys.violation(c) > eps:
        raise NotInSetError(f"point violates the system by {sys.violation(c):.3e}")
    S = sys.active_rows(c, eps)
    basis, offset = _hull(sys, S, tol)
    return FaceDescriptor(S, basis, offset, c.copy())


def _relint_witness(sys: HalfspaceSystem, S: tuple[int, ...]):
    """Maximize a common slack on the rows outside ``S`` subject to ``A_S z = beta_S``."""
    m, d = sys.A.shape
    out = [j for j in range(m) if j not in S]
    A, beta = sys.A, sys.beta
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_eq = np.hstack([A[list(S)], np.zeros((len(S), 1))]) if S else None
    b_eq = beta[list(S)] if S else None
    if out:
        norms = np.linalg.norm(A[out], axis=1, keepdims=True)
        A_ub = np.hstack([A[out], norms])
        b_ub = beta[out]
    else:
        A_ub, b_ub = None, None
    bounds = [(None, None)] * d + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None, -np.inf
    return res.x[:d], float(res.x[-1])


def enumerate_faces(sys: HalfspaceSystem, tol: Tolerances = DEFAULT_TOL) -> FaceLattice:
    """All nonempty faces, each once, ordered by active-set size then indices.

    A row subset is kept only when some point satisfies its rows with
    equality and every other row strictly, which makes it the canonical
    active set of a face; subsets with implied equalities are represented by
    their closure instead.
    """
    m = sys.n_rows
    if m > MAX_ROWS:
        raise CapacityError(f"{m} rows exceed the enumeration cap of {MAX_ROWS}")
    faces = []
    for size in range(m + 1):
        for S in itertools.combinations(range(m), size):
            z, t = _relint_witness(sys, S)
            if z is None:
                continue
            if size < m and t <= tol.active_tol:
                continue
            basis, offset = _hull(sys, S, tol)
            faces.append(FaceDescriptor(S, basis, offset, z))
    return FaceLattice(sys, faces)


def face_span_projection_check(sys: HalfspaceSystem, x, tol: Tolerances = DEFAULT_TOL):
    """Compare ``P_C x`` with the projection of ``x`` onto the hull of ``F_{P_C x}``.

    The hull is ``span F`` for cones and ``aff F`` in general.  Returns
    ``(p, p_hull, ||p - p_hull||)``.
    """
    x = as_point(x, sys.dim)
    p, _ = project_polyhedron(sys, x, tol)
    face = identify_face(sys, p, tol)
    p_hull = face.project_hull(x)
    return p, p_hull, float(np.linalg.norm(p - p_hull))


@dataclass(frozen=True)
class Decomposition:
    kernel: OrthoBasis
    kernel_perp: OrthoBasis
    reduced: HalfspaceSystem


def decompose(sys: HalfspaceSystem, tol: Tolerances = DEFAULT_TOL) -> Decomposition:
    """Split off ``K = ∩ ker a_i``; the reduced system describes ``C ∩ K^⊥`` in ``K^⊥`` coordinates."""
    d = sys.dim
    perp = orthonormalize(list(sys.A), tol=tol.ortho_tol, ambient_dim=d)
    kernel = orthogonal_complement(perp, tol.ortho_tol)
    Q = perp.vectors
    if perp.dim == 0:
        reduced = HalfspaceSystem(np.zeros((0, 1)), np.zeros(0))
    else:
        reduced = HalfspaceSystem(sys.A @ Q.T, sys.beta, feasible_point=Q @ sys.feasible_point)
    return Decomposition(kernel, perp, reduced)


def decompose_projection(sys: HalfspaceSystem, x, tol: Tolerances = DEFAULT_TOL):
    """``(P_C x, P_K x + P_D P_{K^⊥} x, residual)``."""
    x = as_point(x, sys.dim)
    dec = decompose(sys, tol)
    direct, _ = project_polyhedron(sys, x, tol)
    composed = project_subspace(dec.kernel, x)
    if dec.kernel_perp.dim:
        Q = dec.kernel_perp.vectors
        w, _ = project_polyhedron(dec.reduced, Q @ x, tol)
        composed = composed + Q.T @ w
    return direct, composed, float(np.linalg.norm(direct - composed))


@dataclass
class PartitionReport:
    assignments: list[int]
    failures: list[tuple[int, str]]

    @property
    def ok(self) -> bool:
        return not self.failures


def partition_check(sys: HalfspaceSystem, samples, lattice: FaceLattice | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> PartitionReport:
    """Check that each sample lies in the relative interior of exactly one face."""
    samples = list(samples)
    if not samples:
        return PartitionReport([], [])
    lattice = lattice or enumerate_faces(sys, tol)
    assignments, failures = [], []
    for k, c in enumerate(samples):
        c = as_point(c, sys.dim)
        eps = tol.active_tol * _scale(sys, c)
        if sys.violation(c) > eps:
            raise NotInSetError(f"sample {k} is outside the polyhedron")
        act = sys.active_rows(c, eps)
        hits = [i for i, face in enumerate(lattice.faces) if face.active_set == act]
        if len(hits) != 1:
            failures.append((k, f"active set {act} matches {len(hits)} faces"))
            assignments.append(-1)
        else:
            assignments.append(hits[0])
    return PartitionReport(assignments, failures)
