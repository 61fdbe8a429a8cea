"""Projection onto the homogenization ``cl cone(epi f x {1})`` in R^3.

For a point ``(y, s)`` with ``y`` in R^2 the projection is found by
minimizing the strictly convex one-dimensional function

    Psi(alpha) = alpha**2 * d_C(y/alpha)**2 + (alpha - s)**2   (alpha > 0)
    Psi(0)     = d_rec(C)(y)**2 + s**2

with ``C = epi f``, whose recession cone is ``{0} x R_+`` because ``f`` has
compact domain.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from projlab.geometry import DEFAULT_TOL, Tolerances, as_point, safe_norm
from projlab.projectors.epigraph import project_epigraph
from projlab.projectors.polyhedral import IterationBudgetError
from projlab.projectors.sets import FlatFamily

_EPS = np.finfo(float).eps


class PsiSolveResult(NamedTuple):
    alpha_star: float
    projected: np.ndarray
    psi_value: float
    iterations: int


def psi_value(fam: FlatFamily, y2, s: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    y1, y2_ = float(y2[0]), float(y2[1])
    if alpha < 0:
        return math.inf
    if alpha == 0:
        return y1 * y1 + min(y2_, 0.0) ** 2 + s * s
    px, pt, _ = project_epigraph(fam, y1 / alpha, y2_ / alpha, tol)
    return (y1 - alpha * px) ** 2 + (y2_ - alpha * pt) ** 2 + (alpha - s) ** 2


def psi_derivative(fam: FlatFamily, y2, s: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """``-2 alpha <P_C(y/alpha), (Id - P_C)(y/alpha)> + 2 (alpha - s)`` for ``alpha > 0``."""
    if not alpha > 0:
        raise ValueError("psi_derivative needs alpha > 0")
    z1, z2 = float(y2[0]) / alpha, float(y2[1]) / alpha
    px, pt, _ = project_epigraph(fam, z1, z2, tol)
    return -2.0 * alpha * (px * (z1 - px) + pt * (z2 - pt)) + 2.0 * (alpha - s)


def project_homogenized_cone(fam: FlatFamily, point, tol: Tolerances = DEFAULT_TOL, max_expand: int = 200) -> PsiSolveResult:
    point = as_point(point, 3)
    y, s = point[:2], float(point[2])
    scale = safe_norm(point)
    if scale == 0.0:
        return PsiSolveResult(0.0, np.zeros(3), 0.0, 0)
    if s > 0 and project_epigraph(fam, y[0] / s, y[1] / s, tol).inside:
        return PsiSolveResult(s, point.copy(), 0.0, 0)

    dpsi = lambda a: psi_derivative(fam, y, s, a, tol)  # noqa: E731
    a_lo = tol.root_tol * scale
    d_lo = dpsi(a_lo)
    if d_lo >= 0:
        projected = np.array([0.0, max(y[1], 0.0), 0.0])
        return PsiSolveResult(0.0, projected, psi_value(fam, y, s, 0.0, tol), 1)

    lo, hi = a_lo, max(s, a_lo)
    n_eval = 1
    d_hi = dpsi(hi)
    n_eval += 1
    while d_hi < 0:
        lo, hi = hi, 2.0 * hi
        d_hi = dpsi(hi)
        n_eval += 1
        if n_eval > max_expand:
            raise IterationBudgetError("could not bracket the minimizer of Psi", last=hi)
    if d_hi == 0:
        alpha, iters = hi, 0
    else:
        alpha, info = brentq(
            dpsi, lo, hi, xtol=tol.root_tol * max(scale, 1.0), rtol=4 * _EPS,
            maxiter=500, full_output=True, disp=False,
        )
        if not info.converged:
            raise IterationBudgetError("Psi root solve did not converge", last=alpha)
        iters = info.function_calls
    px, pt, _ = project_epigraph(fam, y[0] / alpha, y[1] / alpha, tol)
    projected = np.array([alpha * px, alpha * pt, alpha])
    return PsiSolveResult(alpha, projected, psi_value(fam, y, s, alpha, tol), n_eval + iters)
