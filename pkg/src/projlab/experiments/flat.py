"""Alternating projections between the line ``R x {0}`` and ``epi f`` in R^2.

From ``(u_0, 0)`` the iterates are ``(u_n, f(u_n))`` and ``(u_n, 0)`` with
``u_{n-1} = u_n + f(u_n) f'(u_n)``; the run solves this backward-looking
relation forward, one scalar root per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from projlab.diagnostics import GammaSumSeries, gamma_partial_sums
from projlab.geometry import DEFAULT_TOL, Tolerances
from projlab.projectors import FlatFamily


class RecurrenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class FlatRunSpec:
    family: FlatFamily
    u0: float = 0.5
    n_steps: int = 1000

    def __post_init__(self):
        delta = self.family.delta
        if not 0 < self.u0 < delta:
            raise ValueError(f"u0 = {self.u0!r} must lie in ]0, delta[ = ]0, {delta!r}[")
        q, p, alpha = self.family.model
        if not self.u0 < (-q / (alpha * p)) ** (-1.0 / p):
            raise ValueError("u0 lies outside the interval where x^-q exp(alpha x^-p) decreases")
        if self.n_steps < 0:
            raise ValueError("n_steps must be nonnegative")


@dataclass
class FlatRun:
    spec: FlatRunSpec
    u: np.ndarray
    step_norms: np.ndarray
    residuals: np.ndarray

    @property
    def even_step_norms(self) -> np.ndarray:
        return self.step_norms[1::2]


def _solve_step(prev: float, beta: float, r: int, lbr: float, root_tol: float) -> float:
    # u + h(u) = prev with h = f f' = exp(ln(beta r) - (r+1) ln u - 2 beta u^-r)
    h = math.exp(lbr - (r + 1) * math.log(prev) - 2.0 * beta * prev ** (-r))
    u = prev - h
    lo, hi = 0.0, prev
    for _ in range(100):
        lu = math.log(u)
        e = beta * math.exp(-r * lu)
        h = math.exp(lbr - (r + 1) * lu - 2.0 * e)
        g = u + h - prev
        if abs(g) <= root_tol:
            return u
        if g < 0:
            lo = u
        else:
            hi = u
        dg = 1.0 + h * (2.0 * r * e - (r + 1)) / u
        un = u - g / dg
        if not lo < un < hi:
            un = 0.5 * (lo + hi)
        if un == u:
            return u
        u = un
    raise RecurrenceError(f"no root bracketed below {prev!r}")


def flat_recurrence_run(spec: FlatRunSpec, tol: Tolerances = DEFAULT_TOL) -> FlatRun:
    fam = spec.family
    beta, r = fam.beta, fam.r
    lbr = math.log(beta * r)
    N = spec.n_steps
    u = np.empty(N + 1)
    u[0] = prev = float(spec.u0)
    rt = tol.root_tol
    for n in range(1, N + 1):
        try:
            prev = _solve_step(prev, beta, r, lbr, rt)
        except RecurrenceError as exc:
            raise RecurrenceError(f"step {n}: {exc}") from exc
        u[n] = prev
    un = u[1:]
    f = np.exp(-beta * un ** (-r))
    fp = beta * r * un ** (-r - 1.0) * f
    residuals = np.abs(u[:-1] - un - f * fp)
    steps = np.empty(2 * N)
    steps[0::2] = f * np.sqrt(1.0 + fp * fp)
    steps[1::2] = f
    return FlatRun(spec, u, steps, residuals)


def flat_gamma_sums(run: FlatRun, gammas, pair_checkpoints) -> GammaSumSeries:
    """Gamma-sums over whole pairs: ``S(N)`` covers the first ``2N`` steps."""
    cps = [int(c) for c in pair_checkpoints]
    series = gamma_partial_sums(run.step_norms, gammas, [2 * c for c in cps])
    return replace(series, checkpoints=tuple(cps))
