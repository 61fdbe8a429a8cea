"""Two subspaces of l2 whose alternating projections have divergent gamma-sums.

Tier ``k >= 1`` pairs coordinates ``2k-1`` and ``2k``: the first subspace
contains ``cos(t_k) e_{2k-1} + sin(t_k) e_{2k}``, the second is spanned by the
odd unit vectors.  Tiers decouple, so truncating after ``K`` tiers (ambient
R^{2K+1}) reproduces the first ``K`` tiers of the infinite iteration
exactly.  All powers of ``cos(t_k)`` are formed from
``ln cos^2 t_k = -log1p(1/k) / (2 e^k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from projlab.dynamics import Trajectory, alternating
from projlab.geometry import OrthoBasis
from projlab.projectors import Subspace

MAX_SIMULATED_TIERS = 50


@dataclass(frozen=True)
class L2CounterexampleSpec:
    tiers: int = 30

    def __post_init__(self):
        if int(self.tiers) != self.tiers or self.tiers < 1:
            raise ValueError("tiers must be a positive integer")

    @property
    def dim(self) -> int:
        return 2 * self.tiers + 1

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.tiers + 1, dtype=float)

    @property
    def log_cos2(self) -> np.ndarray:
        k = self.k
        return -np.log1p(1.0 / k) / (2.0 * np.exp(k))

    @property
    def sin2(self) -> np.ndarray:
        return -np.expm1(self.log_cos2)

    @property
    def weights(self) -> np.ndarray:
        return 1.0 / self.k**2

    @property
    def theta(self) -> np.ndarray:
        """Angles ``arccos((k/(k+1))**(1/(4 e^k)))``, decreasing to 0."""
        return np.arcsin(np.sqrt(self.sin2))

    def x0(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x[1::2] = self.weights
        return x


def l2_closed_form(spec: L2CounterexampleSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Iterates ``x^{(2n-1)}`` and ``x^{(2n)}`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("closed forms hold for n >= 1")
    lc, w = spec.log_cos2, spec.weights
    odd = np.zeros(spec.dim)
    even = np.zeros(spec.dim)
    odd[1::2] = w * np.exp(n * lc)
    odd[2::2] = w * np.exp(0.5 * (2 * n - 1) * lc) * np.sqrt(spec.sin2)
    even[1::2] = odd[1::2]
    return odd, even


def lower_bound(n) -> np.ndarray | float:
    """``1 / (2 n (ln n + 1)**5)``, valid for ``n >= 3``."""
    n = np.asarray(n, dtype=float)
    out = 1.0 / (2.0 * n * (np.log(n) + 1.0) ** 5)
    return float(out) if out.ndim == 0 else out


class L2StepNorm(NamedTuple):
    norm_sq: float
    lower_bound: float


def l2_step_norm_sq(spec: L2CounterexampleSpec, n: int) -> L2StepNorm:
    """``||x^{(2n)} - x^{(2n-1)}||^2`` truncated at ``spec.tiers``, with the lower bound."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lc = spec.log_cos2
    terms = spec.weights**2 * np.exp((2 * n - 1) * lc) * spec.sin2
    return L2StepNorm(math.fsum(terms.tolist()), lower_bound(n) if n >= 3 else math.nan)


def l2_step_norms(spec: L2CounterexampleSpec, n_pairs: int, chunk: int = 20_000) -> np.ndarray:
    """All ``2 n_pairs`` step norms of the alternating run, in order.

    The odd step ``x^{(2n-2)} -> x^{(2n-1)}`` has squared length
    ``sum_k w_k^2 cos^{4n-4} sin^2``; the even step has ``cos^{4n-2} sin^2``.
    """
    lc, w2s = spec.log_cos2, spec.weights**2 * spec.sin2
    out = np.empty(2 * n_pairs)
    for start in range(1, n_pairs + 1, chunk):
        n = np.arange(start, min(start + chunk, n_pairs + 1), dtype=float)[:, None]
        odd = np.exp(2 * (n - 1) * lc) @ w2s
        even = np.exp((2 * n - 1) * lc) @ w2s
        i = 2 * (start - 1)
        out[i:i + 2 * n.shape[0]:2] = np.sqrt(odd)
        out[i + 1:i + 2 * n.shape[0]:2] = np.sqrt(even)
    return out


def subspaces(spec: L2CounterexampleSpec) -> tuple[Subspace, Subspace]:
    d, K = spec.dim, spec.tiers
    b1 = np.zeros((K, d))
    idx = np.arange(K)
    b1[idx, 2 * idx + 1] = np.exp(0.5 * spec.log_cos2)
    b1[idx, 2 * idx + 2] = np.sqrt(spec.sin2)
    b2 = np.zeros((K, d))
    b2[idx, 2 * idx + 1] = 1.0
    return Subspace(OrthoBasis(b1, d)), Subspace(OrthoBasis(b2, d))


def l2_simulated(spec: L2CounterexampleSpec, n_pairs: int) -> Trajectory:
    """Alternating projections on the truncated subspaces, starting from ``x^{(0)}``."""
    if spec.tiers > MAX_SIMULATED_TIERS:
        raise ValueError(f"simulation supports at most {MAX_SIMULATED_TIERS} tiers")
    L1, L2 = subspaces(spec)
    traj = alternating(L1, L2, spec.x0(), n_pairs)
    traj.meta.update(kind="l2_counterexample", tiers=spec.tiers)
    return traj


def max_closed_form_deviation(spec: L2CounterexampleSpec, traj: Trajectory) -> float:
    worst = 0.0
    for n in range(1, traj.n_steps // 2 + 1):
        odd, even = l2_closed_form(spec, n)
        worst = max(worst, float(np.abs(traj.point(2 * n - 1) - odd).max()),
                    float(np.abs(traj.point(2 * n) - even).max()))
    return worst
