"""Iteration engine ``x_{n+1} = R_n x_n`` for relaxed projectors ``R_n``.

Random control uses numpy's PCG64 generator.  Each step draws the set index
(``Generator.integers``) and then the relaxation parameter
(``Generator.uniform`` on ``[lambda_min, 2 - lambda_min]``), so a decision log
is reproducible from the seed alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from projlab.geometry import DEFAULT_TOL, DimensionError, Tolerances, as_point, safe_norm
from projlab.projectors import relax

FULL_STORAGE_LIMIT = 100_000
CHECKPOINT_EVERY = 1_000


class RelaxedStep(NamedTuple):
    set_index: int
    lam: float


@dataclass(frozen=True)
class Cyclic:
    order: tuple[int, ...]
    lam: float = 1.0


@dataclass(frozen=True)
class Random:
    seed: int
    lambda_min: float = 1.0

    def __post_init__(self):
        if not 0 < self.lambda_min <= 1:
            raise ValueError("lambda_min must lie in ]0, 1]")


@dataclass(frozen=True)
class Explicit:
    schedule: tuple[RelaxedStep, ...]


ControlPolicy = Cyclic | Random | Explicit


class StepFailure(RuntimeError):
    def __init__(self, step: int, cause: Exception):
        super().__init__(f"projection failed at step {step}: {cause}")
        self.step = step
        self.cause = cause


@dataclass
class Trajectory:
    """Iterates of a run.

    ``points`` holds every iterate for runs of at most ``FULL_STORAGE_LIMIT``
    steps; longer runs keep ``x0``, the final point and ``checkpoints``
    (iterate index -> point) every ``CHECKPOINT_EVERY`` steps.
    """

    x0: np.ndarray
    final: np.ndarray
    step_norms: np.ndarray
    set_indices: np.ndarray
    lambdas: np.ndarray
    points: np.ndarray | None = None
    checkpoints: dict[int, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def n_steps(self) -> int:
        return int(self.step_norms.size)

    @property
    def decisions(self) -> list[RelaxedStep]:
        return [RelaxedStep(int(i), float(l)) for i, l in zip(self.set_indices, self.lambdas)]

    def point(self, n: int) -> np.ndarray:
        if self.points is not None:
            return self.points[n]
        if n == 0:
            return self.x0
        if n == self.n_steps:
            return self.final
        if n in self.checkpoints:
            return self.checkpoints[n]
        raise KeyError(f"iterate {n} was not retained")


def _decisions(policy, n_sets: int, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(policy, Cyclic):
        order = np.asarray(policy.order, dtype=int)
        if order.size == 0:
            raise ValueError("cyclic order is empty")
        idx = np.resize(order, n_steps)
        lam = np.full(n_steps, float(policy.lam))
    elif isinstance(policy, Random):
        rng = np.random.Generator(np.random.PCG64(policy.seed))
        idx = np.empty(n_steps, dtype=int)
        lam = np.empty(n_steps)
        lo, hi = policy.lambda_min, 2.0 - policy.lambda_min
        for n in range(n_steps):
            idx[n] = rng.integers(n_sets)
            lam[n] = rng.uniform(lo, hi)
    elif isinstance(policy, Explicit):
        if len(policy.schedule) < n_steps:
            raise ValueError(f"explicit schedule has {len(policy.schedule)} steps, {n_steps} requested")
        steps = policy.schedule[:n_steps]
        idx = np.array([s.set_index for s in steps], dtype=int)
        lam = np.array([s.lam for s in steps], dtype=float)
    else:
        raise TypeError(f"unknown control policy {policy!r}")
    if n_steps and (idx.min() < 0 or idx.max() >= n_sets):
        raise ValueError("policy refers to a set index outside the collection")
    return idx, lam


def run(
    sets,
    policy,
    x0,
    n_steps: int,
    tol: Tolerances = DEFAULT_TOL,
    observer: Callable[[int, np.ndarray], None] | None = None,
) -> Trajectory:
    """Apply ``n_steps`` relaxed projections chosen by ``policy``.

    ``observer(n, x_n)`` is called for every new iterate, which lets callers
    extract per-step quantities from runs too long to store in full.
    """
    sets = list(sets)
    if not sets:
        raise ValueError("empty set collection")
    x = as_point(x0)
    for k, s in enumerate(sets):
        if s.dim != x.size:
            raise DimensionError(f"set {k} lives in R^{s.dim}, x0 in R^{x.size}")
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")

    idx, lam = _decisions(policy, len(sets), n_steps)
    keep_all = n_steps <= FULL_STORAGE_LIMIT
    points = np.empty((n_steps + 1, x.size)) if keep_all else None
    if keep_all:
        points[0] = x
    checkpoints: dict[int, np.ndarray] = {}
    norms = np.empty(n_steps)
    x0 = x.copy()
    for n in range(n_steps):
        try:
            x_new = relax(sets[idx[n]], lam[n], x, tol)
        except Exception as exc:  # noqa: BLE001 - re-raised with the step index
            raise StepFailure(n, exc) from exc
        norms[n] = safe_norm(x_new - x)
        x = x_new
        if keep_all:
            points[n + 1] = x
        elif (n + 1) % CHECKPOINT_EVERY == 0:
            checkpoints[n + 1] = x.copy()
        if observer is not None:
            observer(n + 1, x)

    meta = {"n_sets": len(sets), "policy": policy}
    return Trajectory(x0, x.copy(), norms, idx, lam, points, checkpoints, meta)


def alternating(set_a, set_b, x0, n_pairs: int, tol: Tolerances = DEFAULT_TOL, observer=None) -> Trajectory:
    """Strict alternation ``P_B P_A`` repeated ``n_pairs`` times."""
    return run([set_a, set_b], Cyclic((0, 1)), x0, 2 * n_pairs, tol, observer)
