"""Random relaxed projections onto random polyhedral cones (the summable case)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from projlab.diagnostics import GammaSumSeries, decade_checkpoints, gamma_partial_sums
from projlab.dynamics import Random, Trajectory, run
from projlab.geometry import DEFAULT_TOL, Tolerances
from projlab.projectors import HalfspaceSystem, Polyhedron

DEFAULT_GAMMAS = (0.25, 0.5, 1.0, 2.0)


def random_cone(rng: np.random.Generator, dim: int, rows: int) -> HalfspaceSystem:
    """Cone with unit normals drawn uniformly from the sphere."""
    A = rng.normal(size=(rows, dim))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    return HalfspaceSystem.cone(A)


@dataclass
class PolyhedralRun:
    cones: list[HalfspaceSystem]
    traj: Trajectory
    sums: GammaSumSeries
    tails: dict[float, float]


def positive_polyhedral_run(
    seed: int,
    dim: int = 4,
    n_cones: int = 3,
    rows_per_cone: int = 4,
    lambda_min: float = 0.3,
    n_steps: int = 10_000,
    gammas=DEFAULT_GAMMAS,
    tol: Tolerances = DEFAULT_TOL,
) -> PolyhedralRun:
    """Seeded run; tails are ``S(n_steps) - S(n_steps // 2)`` per gamma."""
    if dim > 10 or rows_per_cone > 8:
        raise ValueError("dim <= 10 and rows_per_cone <= 8 keep exact projection tractable")
    cone_seq, x_seq, policy_seq = np.random.SeedSequence(seed).spawn(3)
    rng = np.random.default_rng(cone_seq)
    cones = [random_cone(rng, dim, rows_per_cone) for _ in range(n_cones)]
    x0 = np.random.default_rng(x_seq).normal(size=dim)
    policy = Random(int(policy_seq.generate_state(1, np.uint64)[0]), lambda_min)
    traj = run([Polyhedron(c) for c in cones], policy, x0, n_steps, tol)
    traj.meta.update(kind="positive_polyhedral", seed=seed)

    half = n_steps // 2
    cps = sorted(set(decade_checkpoints(n_steps)) | {half, n_steps} - {0}) if n_steps else []
    if not cps:
        return PolyhedralRun(cones, traj, GammaSumSeries(tuple(gammas), (), np.zeros((len(gammas), 0))), {})
    sums = gamma_partial_sums(traj.step_norms, gammas, cps)
    tails = {g: (sums.tail(g, half, n_steps) if half else sums.at(g, n_steps)) for g in sums.gammas}
    return PolyhedralRun(cones, traj, sums, tails)
