"""Descriptions of the closed convex sets the projectors act on."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from projlab.geometry import OrthoBasis, as_point

MAX_ROWS = 20


class InfeasibleSystemError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HalfspaceSystem:
    """Polyhedron ``{x : A @ x <= beta}`` with nonzero rows ``A[i]``.

    Feasibility is certified at construction: either ``feasible_point`` is
    supplied (and checked) or one is found by linear programming.
    """

    A: np.ndarray
    beta: np.ndarray
    feasible_point: np.ndarray | None = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim == 1:
            A = A.reshape(0, A.size) if A.size == 0 else A.reshape(1, -1)
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        if A.shape[0] != beta.size:
            raise ValueError("A and beta have different row counts")
        if A.shape[1] == 0:
            raise ValueError("ambient dimension must be positive")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(beta))):
            raise ValueError("non-finite entries in halfspace system")
        if A.shape[0] and np.any(np.linalg.norm(A, axis=1) == 0):
            raise ValueError("halfspace normals must be nonzero")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "beta", beta)

        z = self.feasible_point
        if z is None:
            z = np.zeros(A.shape[1]) if np.all(beta >= 0) else _find_feasible(A, beta)
        z = as_point(z, A.shape[1])
        if A.shape[0] and np.max(A @ z - beta) > 1e-9 * max(1.0, np.abs(beta).max()):
            raise InfeasibleSystemError("supplied point violates the system")
        object.__setattr__(self, "feasible_point", z)

    @classmethod
    def cone(cls, A) -> "HalfspaceSystem":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls(A, np.zeros(A.shape[0]))

    @classmethod
    def whole_space(cls, dim: int) -> "HalfspaceSystem":
        return cls(np.zeros((0, dim)), np.zeros(0))

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def is_cone(self) -> bool:
        return bool(np.all(self.beta == 0))

    def violation(self, x) -> float:
        if self.n_rows == 0:
            return 0.0
        return float(np.max(self.A @ x - self.beta))

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.violation(x) <= tol

    def active_rows(self, x, tol: float) -> tuple[int, ...]:
        if self.n_rows == 0:
            return ()
        return tuple(int(i) for i in np.flatnonzero(np.abs(self.A @ x - self.beta) <= tol))

    @cached_property
    def independent_subsets(self) -> list[tuple[tuple[int, ...], np.ndarray]]:
        """Row subsets with linearly independent normals, smallest first.

        Each entry carries the inverse Gram matrix ``(A_S A_S^T)^{-1}`` used
        to project onto ``{A_S x = beta_S}``.
        """
        out = []
        m, d = self.A.shape
        for size in range(1, min(m, d) + 1):
            for S in itertools.combinations(range(m), size):
                AS = self.A[list(S)]
                G = AS @ AS.T
                if np.linalg.matrix_rank(AS, tol=1e-10 * max(1.0, np.abs(AS).max())) < size:
                    continue
                out.append((S, np.linalg.inv(G)))
        return out


def _find_feasible(A: np.ndarray, beta: np.ndarray) -> np.ndarray:
    d = A.shape[1]
    res = linprog(np.zeros(d), A_ub=A, b_ub=beta, bounds=[(None, None)] * d, method="highs")
    if res.status != 0:
        raise InfeasibleSystemError("halfspace system is infeasible")
    return res.x


@dataclass(frozen=True)
class FlatFamily:
    """``f(x) = exp(-beta * x**-r)`` on ``[-delta, delta]``, ``f(0) = 0``.

    The domain bound ``delta = (beta*r/(r+1))**(1/r)`` keeps ``f`` convex.
    """

    beta: float = 1.0
    r: int = 2

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError("beta must be positive and finite")
        if int(self.r) != self.r or self.r < 2 or self.r % 2:
            raise ValueError("r must be an even positive integer")
        object.__setattr__(self, "r", int(self.r))

    @property
    def delta(self) -> float:
        return (self.beta * self.r / (self.r + 1)) ** (1.0 / self.r)

    @property
    def model(self) -> tuple[float, float, float]:
        """``(q, p, alpha)`` of the small-x law ``f f' ~ c x**q exp(-alpha x**-p)``."""
        return (-self.r - 1.0, float(self.r), 2.0 * self.beta)


# Set variants -----------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    basis: OrthoBasis

    @property
    def dim(self) -> int:
        return self.basis.ambient_dim


@dataclass(frozen=True)
class Affine:
    basis: OrthoBasis
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "offset", as_point(self.offset, self.basis.ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.ambient_dim


@dataclass(frozen=True)
class Polyhedron:
    system: HalfspaceSystem

    @property
    def dim(self) -> int:
        return self.system.dim


@dataclass(frozen=True)
class Epigraph:
    """Epigraph of a flat function, a subset of R^2."""

    family: FlatFamily

    dim = 2


@dataclass(frozen=True)
class HomogenizedCone:
    """Closed cone generated by ``epi f x {1}`` in R^3."""

    family: FlatFamily

    dim = 3


SetSpec = Subspace | Affine | Polyhedron | Epigraph | HomogenizedCone
