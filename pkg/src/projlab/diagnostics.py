"""Step-sum series, Fejér checks and asymptotic estimators for trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from projlab.geometry import DEFAULT_TOL, as_point


@dataclass(frozen=True)
class GammaSumSeries:
    """``partial_sums[j, k] = sum_{n < checkpoints[k]} step_norms[n] ** gammas[j]``."""

    gammas: tuple[float, ...]
    checkpoints: tuple[int, ...]
    partial_sums: np.ndarray
    segment_sums: np.ndarray | None = None

    def at(self, gamma: float, checkpoint: int) -> float:
        return float(self.partial_sums[self.gammas.index(gamma), self.checkpoints.index(checkpoint)])

    def series(self, gamma: float) -> np.ndarray:
        return self.partial_sums[self.gammas.index(gamma)]

    def tail(self, gamma: float, start: int, stop: int) -> float:
        """``S(stop) - S(start)``; both must be checkpoints.

        Summed from the per-segment totals, so tails far below the size of
        ``S`` itself are not lost to cancellation.
        """
        j = self.gammas.index(gamma)
        i0, i1 = self.checkpoints.index(start), self.checkpoints.index(stop)
        if self.segment_sums is None:
            return float(self.partial_sums[j, i1] - self.partial_sums[j, i0])
        return math.fsum(self.segment_sums[j, i0 + 1:i1 + 1].tolist())


@dataclass(frozen=True)
class AsymptoticModel:
    """Small-x law ``f(x) f'(x) ~ c x**q exp(-alpha x**-p)``."""

    q: float
    p: float
    alpha: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.p > 0 and self.alpha > 0 and self.c > 0):
            raise ValueError("p, alpha and c must be strictly positive")

    def predicted(self, n) -> np.ndarray:
        """``(alpha / ln n) ** (1/p)``, the leading-order size of the n-th abscissa."""
        return (self.alpha / np.log(np.asarray(n, dtype=float))) ** (1.0 / self.p)


def decade_checkpoints(n: int, first: int = 10, last: int = 10**7) -> list[int]:
    out = []
    c = first
    while c <= min(n, last):
        out.append(c)
        c *= 10
    return out


def _powers(norms: np.ndarray, gamma: float) -> np.ndarray:
    # ``**`` maps 0.5, 1 and 2 to correctly rounded sqrt/copy/square
    return norms ** gamma


def gamma_partial_sums(step_norms, gammas, checkpoints) -> GammaSumSeries:
    """Partial sums of ``||step||**gamma`` at each checkpoint.

    Each segment between checkpoints is summed exactly rounded with
    ``math.fsum``; segment totals are accumulated with compensation, so
    10^7 tiny terms lose nothing to ordering.
    """
    norms = np.asarray(step_norms, dtype=float).reshape(-1)
    gammas = tuple(float(g) for g in gammas)
    checkpoints = tuple(int(c) for c in checkpoints)
    if not gammas or not checkpoints:
        raise ValueError("gammas and checkpoints must be nonempty")
    if any(g <= 0 for g in gammas):
        raise ValueError("gammas must be positive")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints[0] < 0 or checkpoints[-1] > norms.size:
        raise ValueError(f"checkpoints must lie in [0, {norms.size}]")
    if np.any(norms < 0) or not np.all(np.isfinite(norms)):
        raise ValueError("step norms must be finite and nonnegative")

    sums = np.empty((len(gammas), len(checkpoints)))
    segments = np.empty_like(sums)
    for j, g in enumerate(gammas):
        terms = _powers(norms, g)
        total = comp = 0.0
        prev = 0
        for k, c in enumerate(checkpoints):
            seg = math.fsum(terms[prev:c].tolist())
            segments[j, k] = seg
            # Neumaier compensated running total of the exactly rounded segments
            t = total + seg
            if abs(total) >= abs(seg):
                comp += (total - t) + seg
            else:
                comp += (seg - t) + total
            total = t
            sums[j, k] = total + comp
            prev = c
    return GammaSumSeries(gammas, checkpoints, sums, segments)


class FejerResult(NamedTuple):
    max_increase: float
    passed: bool


def fejer_check(traj, z, tol=DEFAULT_TOL) -> FejerResult:
    """Largest one-step increase of ``||x_n - z||`` along a fully stored trajectory."""
    if traj.points is None:
        raise ValueError("Fejér check needs a trajectory with every iterate stored")
    z = as_point(z, traj.points.shape[1])
    dist = np.linalg.norm(traj.points - z, axis=1)
    inc = float(np.max(np.diff(dist))) if dist.size > 1 else 0.0
    inc = max(inc, 0.0)
    return FejerResult(inc, inc <= tol.equality_tol)


def asymptotic_ratio(series, model: AsymptoticModel, checkpoints) -> np.ndarray:
    """``series[n] / (alpha / ln n)**(1/p)`` at each checkpoint ``n``."""
    series = np.asarray(series, dtype=float)
    cps = np.asarray(checkpoints, dtype=int)
    if np.any(cps < 3):
        raise ValueError("checkpoints must be >= 3 so that ln n > 1")
    vals = series[cps]
    if np.any(vals <= 0):
        raise ValueError("series entries must be positive")
    return vals / model.predicted(cps)


def growth_exponent(series: GammaSumSeries, gamma: float, decades: float = 2.0) -> float:
    """Least-squares slope of ``ln S(N)`` against ``ln N`` over the last ``decades``.

    For the divergent examples with ``gamma < 2`` the slope approaches
    ``1 - gamma/2`` from below (log corrections); convergent series give 0.
    """
    cps = np.asarray(series.checkpoints, dtype=float)
    S = series.series(gamma)
    keep = (cps >= cps[-1] / 10**decades * (1 - 1e-12)) & (cps > 0)
    if keep.sum() < 3 or cps[-1] / cps[keep][0] < 10**decades * (1 - 1e-12):
        raise ValueError("need at least 3 checkpoints spanning the requested decades")
    if np.any(S[keep] <= 0):
        return 0.0 if np.all(S[keep] == 0) else math.nan
    slope = np.polyfit(np.log(cps[keep]), np.log(S[keep]), 1)[0]
    return float(slope)
