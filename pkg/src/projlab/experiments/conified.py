"""Alternating projections between the plane ``x_2 = 0`` and the homogenized cone.

From ``a_0 (b_0, 0, 1)`` the iterates are ``a_n (b_n, f(b_n), 1)`` and
``a_n (b_n, 0, 1)``; ``a_n`` is read off the third coordinate of the even
iterate and ``b_n`` from its first coordinate divided by ``a_n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from projlab.dynamics import Trajectory, alternating
from projlab.geometry import DEFAULT_TOL, OrthoBasis, Tolerances
from projlab.projectors import FlatFamily, HomogenizedCone, Subspace


@dataclass(frozen=True)
class ConifiedRunSpec:
    family: FlatFamily
    a0: float = 1.0
    b0: float = 0.3
    n_steps: int = 1000

    def __post_init__(self):
        if not self.a0 > 0:
            raise ValueError("a0 must be positive")
        if not 0 < self.b0 < min(1.0, self.family.delta):
            raise ValueError(f"b0 = {self.b0!r} must lie in ]0, min(1, delta)[")
        q, p, alpha = self.family.model
        if not self.b0 < (-q / (alpha * p)) ** (-1.0 / p):
            raise ValueError("b0 lies outside the interval where x^-q exp(alpha x^-p) decreases")
        if self.n_steps < 0:
            raise ValueError("n_steps must be nonnegative")


@dataclass
class ConifiedRun:
    spec: ConifiedRunSpec
    a: np.ndarray
    b: np.ndarray
    alpha_star: np.ndarray
    step_norms: np.ndarray
    traj: Trajectory

    def ratio_identity_residuals(self) -> np.ndarray:
        """``|a_{n-1}/a_n - 1 - f(b_n)(f(b_n) - f'(b_n) b_n)|`` for ``n >= 1``."""
        fam = self.spec.family
        b = self.b[1:]
        f = np.exp(-fam.beta * b ** (-fam.r))
        fp = fam.beta * fam.r * b ** (-fam.r - 1.0) * f
        return np.abs(self.a[:-1] / self.a[1:] - 1.0 - f * (f - fp * b))

    def abscissa_residuals(self) -> np.ndarray:
        """``|(a_{n-1}/a_n) b_{n-1} - b_n - f(b_n) f'(b_n)|`` for ``n >= 1``."""
        fam = self.spec.family
        b = self.b[1:]
        f = np.exp(-fam.beta * b ** (-fam.r))
        fp = fam.beta * fam.r * b ** (-fam.r - 1.0) * f
        return np.abs(self.a[:-1] / self.a[1:] * self.b[:-1] - b - f * fp)


def plane(dim: int = 3) -> Subspace:
    return Subspace(OrthoBasis(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]), dim))


def conified_run(spec: ConifiedRunSpec, tol: Tolerances = DEFAULT_TOL) -> ConifiedRun:
    N = spec.n_steps
    a = np.empty(N + 1)
    b = np.empty(N + 1)
    alpha = np.empty(N)
    a[0], b[0] = spec.a0, spec.b0

    def observe(n: int, x: np.ndarray) -> None:
        k = (n + 1) // 2
        if n % 2:
            alpha[k - 1] = x[2]
        else:
            a[k] = x[2]
            b[k] = x[0] / x[2]

    x0 = spec.a0 * np.array([spec.b0, 0.0, 1.0])
    traj = alternating(HomogenizedCone(spec.family), plane(), x0, N, tol, observer=observe)
    traj.meta.update(kind="conified_r3", a0=spec.a0, b0=spec.b0)
    return ConifiedRun(spec, a, b, alpha, traj.step_norms, traj)
