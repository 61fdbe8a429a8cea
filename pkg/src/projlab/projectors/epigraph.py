"""Projection onto the epigraph of a flat function ``exp(-beta x^-r)``."""

from __future__ import annotations

import math
from typing import NamedTuple

from projlab.geometry import DEFAULT_TOL, Tolerances
from projlab.projectors.sets import FlatFamily

_EPS = 2.220446049250313e-16
# beyond ln(e) = 7, f = exp(-e) is below the smallest subnormal
_LOG_UNDERFLOW = 7.0


class DomainError(ValueError):
    pass


class EpigraphProjection(NamedTuple):
    x: float
    t: float
    inside: bool


def evaluate_flat(fam: FlatFamily, x: float) -> tuple[float, float]:
    """Return ``(f(x), f'(x))``; both vanish at ``x = 0``."""
    ax = abs(x)
    if ax > fam.delta:
        raise DomainError(f"|x| = {ax!r} exceeds the domain bound {fam.delta!r}")
    if ax == 0.0:
        return 0.0, 0.0
    lx = math.log(ax)
    if math.log(fam.beta) - fam.r * lx > _LOG_UNDERFLOW:
        return 0.0, 0.0
    e = fam.beta * math.exp(-fam.r * lx)
    f = math.exp(-e)
    fp = math.exp(math.log(fam.beta * fam.r) - (fam.r + 1) * lx - e)
    return f, math.copysign(fp, x)


def _derivs(beta: float, r: int, y: float) -> tuple[float, float, float]:
    # f, f', f'' for 0 <= y <= delta, no domain check
    if y == 0.0:
        return 0.0, 0.0, 0.0
    ly = math.log(y)
    if math.log(beta) - r * ly > _LOG_UNDERFLOW:
        return 0.0, 0.0, 0.0
    e = beta * math.exp(-r * ly)
    f = math.exp(-e)
    if f == 0.0:
        return 0.0, 0.0, 0.0
    fp = math.exp(math.log(beta * r) - (r + 1) * ly - e)
    fpp = fp * (r * e - (r + 1)) / y
    return f, fp, fpp


def _graph_root(beta: float, r: int, ax: float, rho: float, hi: float, root_tol: float) -> float:
    """Solve ``y + (f(y) - rho) f'(y) = ax`` on ``[0, hi]``; needs ``g(hi) > 0``.

    Newton's method safeguarded by the bracket, which is tightened with every
    evaluation.  Stops once ``|g(y)| <= root_tol``.
    """
    lo = 0.0
    y = hi
    for _ in range(200):
        f, fp, fpp = _derivs(beta, r, y)
        g = y + (f - rho) * fp - ax
        if abs(g) <= root_tol:
            return y
        if g < 0:
            lo = y
        else:
            hi = y
        dg = 1.0 + fp * fp + (f - rho) * fpp
        yn = y - g / dg if dg > 0 else -1.0
        if not lo < yn < hi:
            yn = 0.5 * (lo + hi)
        if abs(yn - y) <= 2 * _EPS * y or hi - lo <= 2 * _EPS * hi:
            return yn
        y = yn
    return y


def epigraph_residual(fam: FlatFamily, x: float, rho: float, y: float) -> float:
    """``|x - y - (f(y) - rho) f'(y)|``, the optimality residual of a graph point."""
    f, fp = evaluate_flat(fam, y)
    return abs(x - y - (f - rho) * fp)


def project_epigraph(fam: FlatFamily, x: float, rho: float, tol: Tolerances = DEFAULT_TOL) -> EpigraphProjection:
    """Nearest point of ``epi f`` to ``(x, rho)``.

    Outside the epigraph and over the domain, the nearest point is
    ``(y, f(y))`` with ``y`` between 0 and ``x`` solving
    ``x = y + (f(y) - rho) f'(y)``.  Beyond the domain bound the vertical
    boundary ray ``{delta} x [f(delta), inf)`` competes with the graph.
    """
    x = float(x)
    rho = float(rho)
    if not (math.isfinite(x) and math.isfinite(rho)):
        raise ValueError("non-finite input to project_epigraph")
    beta, r, delta = fam.beta, fam.r, fam.delta
    ax = abs(x)
    if ax <= delta and _derivs(beta, r, ax)[0] <= rho:
        return EpigraphProjection(x, rho, True)
    if ax == 0.0:
        return EpigraphProjection(0.0, 0.0, False)

    candidates = []
    hi = min(ax, delta)
    f, fp, _ = _derivs(beta, r, hi)
    if hi + (f - rho) * fp - ax > 0:
        y = _graph_root(beta, r, ax, rho, hi, tol.root_tol)
        candidates.append((y, _derivs(beta, r, y)[0]))
    elif ax <= delta:
        # f underflowed near the origin: the graph point is (x, f(x)) to machine precision
        candidates.append((ax, f))
    if ax > delta:
        candidates.append((delta, max(rho, f)))
    y, t = min(candidates, key=lambda c: (ax - c[0]) ** 2 + (rho - c[1]) ** 2)
    return EpigraphProjection(math.copysign(y, x), t, False)
