"""Exact and iterative projection onto polyhedra given by halfspaces."""

from __future__ import annotations

import numpy as np
from scipy.optimize import nnls

from projlab.geometry import DEFAULT_TOL, Tolerances, as_point, safe_norm
from projlab.projectors.sets import MAX_ROWS, HalfspaceSystem


class CapacityError(ValueError):
    """Too many rows for exhaustive active-set enumeration."""


class IterationBudgetError(RuntimeError):
    def __init__(self, message: str, last=None):
        super().__init__(message)
        self.last = last


def _scale(sys: HalfspaceSystem, x: np.ndarray) -> float:
    b = np.abs(sys.beta).max() if sys.n_rows else 0.0
    return max(safe_norm(x), float(b), 5e-324)


def project_polyhedron(sys: HalfspaceSystem, x, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, tuple[int, ...]]:
    """Exact projection by enumerating linearly independent active sets.

    Returns the projection and the active subset whose multipliers certify
    it.  Any KKT point is the projection, so the scan stops at the first
    candidate that is KKT-exact to rounding; otherwise the candidate with the
    smallest KKT violation wins.
    """
    x = as_point(x, sys.dim)
    if sys.n_rows > MAX_ROWS:
        raise CapacityError(
            f"{sys.n_rows} rows exceed the enumeration cap of {MAX_ROWS}; "
            "use project_polyhedron_dykstra instead"
        )
    if sys.n_rows == 0 or sys.violation(x) <= 0.0:
        return x.copy(), ()

    scale = _scale(sys, x)
    exact = 64 * np.finfo(float).eps * scale
    A, beta = sys.A, sys.beta
    best = None
    for S, Ginv in sys.independent_subsets:
        idx = list(S)
        AS = A[idx]
        mu = Ginv @ (AS @ x - beta[idx])
        z = x - AS.T @ mu
        err = max(-float(mu.min()), float(np.max(A @ z - beta)), 0.0)
        if best is None or err < best[0]:
            best = (err, z, S)
            if err <= exact:
                break
    err, z, S = best
    if err > tol.active_tol * scale:
        raise RuntimeError(f"no KKT-certified active set found (violation {err:.3e})")
    return z, S


def project_polyhedron_exact(sys: HalfspaceSystem, x, tol: Tolerances = DEFAULT_TOL):
    """Projection onto the polyhedron together with the minimal face containing it."""
    from projlab.faces import identify_face

    p, _ = project_polyhedron(sys, x, tol)
    return p, identify_face(sys, p, tol)


def kkt_certificate(sys: HalfspaceSystem, x, p, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Independent optimality check of ``p`` as the projection of ``x``.

    Fits ``x - p = sum mu_i a_i`` over the rows active at ``p`` by
    nonnegative least squares.
    """
    x = as_point(x, sys.dim)
    p = as_point(p, sys.dim)
    scale = _scale(sys, x)
    act = list(sys.active_rows(p, tol.active_tol * scale))
    r = x - p
    if act:
        mu, resid = nnls(sys.A[act].T, r)
    else:
        mu, resid = np.zeros(0), float(np.linalg.norm(r))
    return {
        "active": tuple(act),
        "multipliers": mu,
        "stationarity": float(resid),
        "violation": max(sys.violation(p), 0.0),
    }


def project_polyhedron_dykstra(
    sys: HalfspaceSystem, x, max_iter: int = 200_000, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """Cyclic Dykstra iteration over the halfspaces, in row order.

    Stops when a full sweep moves the iterate and every correction vector
    by less than ``root_tol`` and the iterate is feasible to the same
    accuracy (all relative to the problem scale).  A small primal move
    alone is not enough: the iterate can creep while still infeasible.
    """
    x = as_point(x, sys.dim)
    m = sys.n_rows
    if m == 0:
        return x.copy()
    A = sys.A
    beta = sys.beta
    sq = np.einsum("ij,ij->i", A, A)
    q = np.zeros_like(A)
    z = x.copy()
    stop = tol.root_tol * _scale(sys, x)
    for _ in range(max_iter):
        z_prev = z.copy()
        q_prev = q.copy()
        for i in range(m):
            y = z + q[i]
            excess = A[i] @ y - beta[i]
            z = y - (excess / sq[i]) * A[i] if excess > 0 else y
            q[i] = y - z
        if (np.linalg.norm(z - z_prev) < stop and np.abs(q - q_prev).max() < stop
                and sys.violation(z) <= stop):
            return z
    raise IterationBudgetError(f"Dykstra did not converge in {max_iter} sweeps", last=z)
