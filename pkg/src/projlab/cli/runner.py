"""Execute a validated config and assemble its :class:`RunReport`."""

from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np

from projlab import __version__
from projlab.cli.config import ExperimentConfig, build_custom, build_spec
from projlab.cli.report import RunReport, columns_for, finite_or_none
from projlab.diagnostics import AsymptoticModel, GammaSumSeries, asymptotic_ratio, decade_checkpoints, fejer_check, gamma_partial_sums
from projlab.dynamics import FULL_STORAGE_LIMIT, run
from projlab.experiments import (
    conified_run,
    flat_recurrence_run,
    l2_closed_form,
    l2_simulated,
    l2_step_norm_sq,
    l2_step_norms,
    lower_bound,
    max_closed_form_deviation,
)
from projlab.experiments.conified import plane
from projlab.experiments.l2 import MAX_SIMULATED_TIERS, subspaces
from projlab.experiments.polyhedral import positive_polyhedral_run
from projlab.geometry import DEFAULT_TOL, OrthoBasis, Tolerances
from projlab.projectors import Epigraph, HomogenizedCone, Polyhedron, Subspace, distance

PER_STEP_LIMIT = 10_000


def report_indices(n: int, checkpoints: list[int] | None) -> tuple[list[int], list[int]]:
    """``(checkpoints, row indices)``: rows are every step for short runs, else the checkpoints."""
    if checkpoints is None:
        cps = sorted((set(decade_checkpoints(n)) | {n // 2, n}) - {0}) if n else []
    else:
        cps = list(checkpoints)
    rows = list(range(1, n + 1)) if n <= PER_STEP_LIMIT else cps
    return cps, rows


def _sums_table(sums, rows: list[int]) -> list[list[float]]:
    """Per-row gamma-sum values; ``sums`` must be evaluated at every row index."""
    pos = {c: k for k, c in enumerate(sums.checkpoints)}
    return [[float(sums.partial_sums[j, pos[n]]) for j in range(len(sums.gammas))] for n in rows]


def _series(values, rows):
    return [float(v) for v in values[rows]] if rows else []


def _ratios(values, model, cps):
    out = []
    for c in cps:
        out.append(finite_or_none(asymptotic_ratio(values, model, [c])[0]) if c >= 3 and values[c] > 0 else None)
    return out


def _assemble(cfg, cps, rows, sums_at_cps, table, extra_cols, ratios, final, dists, residuals, meta, t0):
    cols = columns_for(cfg.kind, cfg.gammas)
    body = []
    for i, n in enumerate(rows):
        row = [n] + [col[i] for col in extra_cols] + table[i]
        if "ratio" in cols:
            row.append(ratios[i])
        body.append(row)
    return RunReport(
        kind=cfg.kind,
        config=cfg.to_dict(),
        version=__version__,
        seed=cfg.seed,
        duration_s=time.perf_counter() - t0,
        n_steps=int(cfg.parameters["n_steps"]),
        final_point=[float(v) for v in final],
        final_distances=[float(v) for v in dists],
        gammas=list(cfg.gammas),
        checkpoints=list(cps),
        partial_sums=[[float(v) for v in row] for row in sums_at_cps],
        ratios=_ratios_at(cps, rows, ratios),
        residuals={k: float(v) for k, v in residuals.items()},
        meta=meta,
        columns=cols,
        rows=body,
    )


def _ratios_at(cps, rows, row_ratios):
    lookup = dict(zip(rows, row_ratios))
    return [lookup.get(c) for c in cps]


def _pair_sums(norms, gammas, labels, per_label: int):
    """Gamma-sums at ``labels``, each covering the first ``per_label * label`` steps."""
    if not labels:
        empty = np.zeros((len(gammas), 0))
        return GammaSumSeries(tuple(gammas), (), empty, empty)
    sums = gamma_partial_sums(norms, gammas, [per_label * c for c in labels])
    return replace(sums, checkpoints=tuple(labels))


def _union(cps, rows):
    return sorted(set(cps) | set(rows))


def _sums_at(sums, cps):
    pos = {c: k for k, c in enumerate(sums.checkpoints)}
    return [[float(sums.partial_sums[j, pos[c]]) for c in cps] for j in range(len(sums.gammas))]


def _run_flat(cfg: ExperimentConfig, tol: Tolerances, t0: float) -> RunReport:
    spec = build_spec(cfg)
    n = spec.n_steps
    res = flat_recurrence_run(spec, tol)
    cps, rows = report_indices(n, cfg.checkpoints)
    allc = _union(cps, rows)
    sums = _pair_sums(res.step_norms, cfg.gammas, allc, 2)
    model = AsymptoticModel(*spec.family.model, c=spec.family.beta * spec.family.r)
    u = res.u
    f_rows = [float(v) for v in res.step_norms[[2 * k - 1 for k in rows]]] if rows else []
    epi = Epigraph(spec.family)
    line = Subspace(OrthoBasis(np.array([[1.0, 0.0]]), 2))
    final = np.array([u[-1], 0.0])
    return _assemble(
        cfg, cps, rows, _sums_at(sums, cps), _sums_table(sums, rows),
        [_series(u, rows), f_rows], _ratios(u, model, rows),
        final, [distance(epi, final, tol), distance(line, final, tol)],
        {"max_recurrence_residual": float(res.residuals.max()) if n else 0.0},
        {"u0": spec.u0, "model": list(spec.family.model), "delta": spec.family.delta}, t0,
    )


def _run_conified(cfg: ExperimentConfig, tol: Tolerances, t0: float) -> RunReport:
    spec = build_spec(cfg)
    n = spec.n_steps
    res = conified_run(spec, tol)
    cps, rows = report_indices(n, cfg.checkpoints)
    allc = _union(cps, rows)
    sums = _pair_sums(res.step_norms, cfg.gammas, allc, 2)
    model = AsymptoticModel(*spec.family.model, c=spec.family.beta * spec.family.r)
    even = [float(v) for v in res.step_norms[[2 * k - 1 for k in rows]]] if rows else []
    final = res.traj.final
    residuals = {
        "max_ratio_identity_residual": float(res.ratio_identity_residuals().max()) if n else 0.0,
        "max_abscissa_residual": float(res.abscissa_residuals().max()) if n else 0.0,
        "min_alpha_star": float(res.alpha_star.min()) if n else math.inf,
    }
    if not math.isfinite(residuals["min_alpha_star"]):
        residuals.pop("min_alpha_star")
    return _assemble(
        cfg, cps, rows, _sums_at(sums, cps), _sums_table(sums, rows),
        [_series(res.a, rows), _series(res.b, rows), even], _ratios(res.b, model, rows),
        final, [distance(HomogenizedCone(spec.family), final, tol), distance(plane(), final, tol)],
        residuals, {"a0": spec.a0, "b0": spec.b0, "a_limit_estimate": float(final[2])}, t0,
    )


def _run_l2(cfg: ExperimentConfig, tol: Tolerances, t0: float) -> RunReport:
    spec = build_spec(cfg)
    n = int(cfg.parameters["n_steps"])
    cps, rows = report_indices(n, cfg.checkpoints)
    allc = _union(cps, rows)
    norms = l2_step_norms(spec, n)
    sums = _pair_sums(norms, cfg.gammas, allc, 2)
    nsq = [l2_step_norm_sq(spec, k).norm_sq for k in rows]
    lb = [lower_bound(k) if k >= 3 else None for k in rows]
    margin = [s / b if b else None for s, b in zip(nsq, lb)]
    residuals = {}
    sim = min(int(cfg.parameters["simulate_pairs"]), n)
    if sim and spec.tiers <= MAX_SIMULATED_TIERS:
        residuals["max_closed_form_deviation"] = max_closed_form_deviation(spec, l2_simulated(spec, sim))
    if any(m is not None for m in margin):
        residuals["min_bound_margin"] = min(m for m in margin if m is not None)
    final = l2_closed_form(spec, n)[1] if n else spec.x0()
    L1, L2 = subspaces(spec)
    return _assemble(
        cfg, cps, rows, _sums_at(sums, cps), _sums_table(sums, rows),
        [nsq, lb, [math.sqrt(v) for v in nsq]], margin,
        final, [distance(L1, final, tol), distance(L2, final, tol)],
        residuals, {"tiers": spec.tiers, "ratio": "step_norm_sq / lower_bound"}, t0,
    )


def _step_report(cfg, traj, sets, tol, t0, meta):
    n = traj.n_steps
    cps, rows = report_indices(n, cfg.checkpoints)
    allc = _union(cps, rows)
    sums = _pair_sums(traj.step_norms, cfg.gammas, allc, 1)
    idx = [int(traj.set_indices[k - 1]) for k in rows]
    lam = [float(traj.lambdas[k - 1]) for k in rows]
    steps = [float(traj.step_norms[k - 1]) for k in rows]
    residuals = {}
    if traj.points is not None and all(isinstance(s, Polyhedron) and s.system.is_cone for s in sets):
        residuals["fejer_max_increase"] = fejer_check(traj, np.zeros(traj.final.size), tol).max_increase
    return _assemble(
        cfg, cps, rows, _sums_at(sums, cps), _sums_table(sums, rows),
        [idx, lam, steps], [None] * len(rows),
        traj.final, [distance(s, traj.final, tol) for s in sets], residuals, meta, t0,
    )


def _run_polyhedral(cfg: ExperimentConfig, tol: Tolerances, t0: float) -> RunReport:
    build_spec(cfg)
    p = cfg.parameters
    res = positive_polyhedral_run(cfg.seed, int(p["dim"]), int(p["n_cones"]), int(p["rows_per_cone"]),
                                  float(p["lambda_min"]), int(p["n_steps"]), tuple(cfg.gammas), tol)
    sets = [Polyhedron(c) for c in res.cones]
    meta = {"tails": {f"{g:g}": float(t) for g, t in res.tails.items()},
            "cones": [c.A.tolist() for c in res.cones]}
    return _step_report(cfg, res.traj, sets, tol, t0, meta)


def _run_custom(cfg: ExperimentConfig, tol: Tolerances, t0: float) -> RunReport:
    sets, policy, x0 = build_custom(cfg)
    traj = run(sets, policy, x0, int(cfg.parameters["n_steps"]), tol)
    return _step_report(cfg, traj, sets, tol, t0, {"full_storage": traj.n_steps <= FULL_STORAGE_LIMIT})


_RUNNERS = {
    "flat_r2": _run_flat,
    "conified_r3": _run_conified,
    "l2_counterexample": _run_l2,
    "positive_polyhedral": _run_polyhedral,
    "custom": _run_custom,
}


def execute(cfg: ExperimentConfig, tol: Tolerances = DEFAULT_TOL) -> RunReport:
    t0 = time.perf_counter()
    with np.errstate(over="ignore", under="ignore"):
        return _RUNNERS[cfg.kind](cfg, tol, t0)
