"""Acceptance criteria shared by ``projlab verify`` and the test suite.

Each criterion is a function of a :class:`Context` returning ``(passed,
detail)``.  The context caches the long flat and conified runs so that
criteria reading the same run do not recompute it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from projlab.diagnostics import AsymptoticModel, asymptotic_ratio, growth_exponent
from projlab.experiments import (
    ConifiedRunSpec,
    FlatRunSpec,
    L2CounterexampleSpec,
    conified_run,
    flat_gamma_sums,
    flat_recurrence_run,
    l2_simulated,
    lower_bound,
    max_closed_form_deviation,
    positive_polyhedral_run,
    random_cone,
)
from projlab.faces import decompose_projection, enumerate_faces, face_span_projection_check, partition_check
from projlab.geometry import DEFAULT_TOL, Tolerances
from projlab.projectors import FlatFamily, HalfspaceSystem, project_homogenized_cone, project_polyhedron
from projlab.projectors.cone import psi_derivative, psi_value

RATIO_DECADES = (10**3, 10**4, 10**5, 10**6)
# Band for the gamma = 1 growth exponent of the flat run over N in [1e4, 1e6];
# the validated run gives 0.3947 (1/2 minus log corrections).
GROWTH_BAND = (0.3, 0.5)
TAIL_BOUND = 1e-6

FLAT_STEPS = 10**6
CONIFIED_PAIRS = 10**5


@dataclass
class Context:
    tol: Tolerances = DEFAULT_TOL
    cache: dict = field(default_factory=dict)

    def flat(self):
        if "flat" not in self.cache:
            spec = FlatRunSpec(FlatFamily(1.0, 2), 0.5, FLAT_STEPS)
            self.cache["flat"] = flat_recurrence_run(spec, self.tol)
        return self.cache["flat"]

    def conified(self):
        if "conified" not in self.cache:
            spec = ConifiedRunSpec(FlatFamily(1.0, 2), 1.0, 0.3, CONIFIED_PAIRS)
            self.cache["conified"] = conified_run(spec, self.tol)
        return self.cache["conified"]


@dataclass(frozen=True)
class Criterion:
    key: str
    family: str
    title: str
    budget: float | None
    check: Callable[[Context], tuple[bool, str]]


@dataclass
class CriterionResult:
    key: str
    family: str
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float | None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" / {self.budget:g}s" if self.budget else ""
        return f"{status}  [{self.key:>3}] {self.title}: {self.detail} ({self.seconds:.2f}s{budget})"


def _fmt(x: float) -> str:
    return f"{x:.3e}"


# ---------------------------------------------------------------------------
# l2 counterexample


def c1_l2_closed_form(ctx: Context):
    spec = L2CounterexampleSpec(5)
    dev = max_closed_form_deviation(spec, l2_simulated(spec, 50))
    return dev < 1e-10, f"max deviation {_fmt(dev)} (< 1e-10)"


def _l2_norm_sq(spec: L2CounterexampleSpec, n: np.ndarray) -> np.ndarray:
    # sum_k w_k^2 cos^{4n-2}(t_k) sin^2(t_k), tier terms in log space
    w2s = spec.weights**2 * spec.sin2
    return np.exp((2.0 * n[:, None] - 1.0) * spec.log_cos2) @ w2s


def c2_l2_lower_bound(ctx: Context):
    n = np.arange(3, 10**4 + 1, dtype=float)
    s30 = _l2_norm_sq(L2CounterexampleSpec(30), n)
    s60 = _l2_norm_sq(L2CounterexampleSpec(60), n)
    margin = float(np.min(s30 / lower_bound(n)))
    rel = float(np.max(np.abs(s60 - s30) / s30))
    ok = margin >= 1.0 and rel < 1e-12
    return ok, f"min norm^2/bound {margin:.4f} (>= 1), tier-doubling change {_fmt(rel)} (< 1e-12)"


# ---------------------------------------------------------------------------
# flat R^2


def c3_flat_fidelity(ctx: Context):
    run = ctx.flat()
    res = float(np.max(run.residuals))
    dec = bool(np.all(np.diff(run.u) < 0))
    return res <= 1e-12 and dec, f"max residual {_fmt(res)} (<= 1e-12), strictly decreasing {dec}"


def flat_ratios(ctx: Context) -> np.ndarray:
    run = ctx.flat()
    return asymptotic_ratio(run.u, AsymptoticModel(*run.spec.family.model), RATIO_DECADES)


def c4a_flat_ratios(ctx: Context):
    r = flat_ratios(ctx)
    gaps = np.abs(r - 1.0)
    ok = bool(np.all(np.isfinite(r)) and np.all(r > 0) and np.all(np.diff(gaps) < 0))
    return ok, "ratios " + ", ".join(f"{v:.4f}" for v in r) + " (|ratio-1| strictly decreasing)"


def _flat_sums(ctx: Context):
    if "flat_sums" not in ctx.cache:
        cps = [10, 100, 1000, 10**4, 10**5, 5 * 10**5, 10**6]
        ctx.cache["flat_sums"] = flat_gamma_sums(ctx.flat(), (0.5, 1.0, 2.0), cps)
    return ctx.cache["flat_sums"]


def c4b_flat_growth(ctx: Context):
    g = growth_exponent(_flat_sums(ctx), 1.0)
    lo, hi = GROWTH_BAND
    return lo <= g <= hi, f"gamma=1 growth exponent {g:.4f} (in [{lo}, {hi}])"


def c4c_flat_tail(ctx: Context):
    t = _flat_sums(ctx).tail(2.0, 5 * 10**5, 10**6)
    return t < TAIL_BOUND, f"gamma=2 tail S(1e6)-S(5e5) = {_fmt(t)} (< 1e-6)"


# ---------------------------------------------------------------------------
# conified R^3


def c5_conified(ctx: Context):
    run = ctx.conified()
    spec = run.spec
    a_nd = bool(np.all(np.diff(run.a) >= 0))
    b_dec = bool(np.all(np.diff(run.b) < 0))
    res = float(np.max(run.ratio_identity_residuals()))
    alpha_pos = bool(np.all(run.alpha_star > 0))
    final = run.traj.final
    first_ok = final[0] < 10 * run.b[-1]
    lo, hi = spec.a0 * (1 - spec.b0), spec.a0 * (1 + spec.b0)
    third_ok = lo <= final[2] <= hi
    ok = a_nd and b_dec and res <= 1e-10 and alpha_pos and first_ok and third_ok
    detail = (f"a nondecreasing {a_nd}, b decreasing {b_dec}, identity residual {_fmt(res)} (<= 1e-10), "
              f"alpha*>0 {alpha_pos}, x1 {final[0]:.4g} < 10 b {10 * run.b[-1]:.4g}, "
              f"x3 {final[2]:.6f} in [{lo:g}, {hi:g}]")
    return ok, detail


def c6_cross_section(ctx: Context):
    n = 10**4
    flat, con = ctx.flat(), ctx.conified()
    model = AsymptoticModel(*flat.spec.family.model)
    ru = float(asymptotic_ratio(flat.u, model, [n])[0])
    rb = float(asymptotic_ratio(con.b, model, [n])[0])
    gap = abs(rb - ru)
    return gap <= 0.2 * max(abs(rb), abs(ru)), f"ratio b {rb:.4f} vs u {ru:.4f} at n=1e4, gap {gap:.4f}"


# ---------------------------------------------------------------------------
# polyhedral


def c7_polyhedral(ctx: Context):
    run = positive_polyhedral_run(1, tol=ctx.tol)
    ok = all(t < TAIL_BOUND for t in run.tails.values())
    return ok, "tails " + ", ".join(f"g={g:g}: {_fmt(t)}" for g, t in run.tails.items())


def c8_faces(ctx: Context):
    rng = np.random.default_rng(8)
    worst = 0.0
    bad = 0
    for _ in range(100):
        d = int(rng.integers(2, 6))
        cone = random_cone(rng, d, int(rng.integers(1, d + 3)))
        x = rng.normal(size=d) * 2.0
        worst = max(worst, face_span_projection_check(cone, x, ctx.tol)[2])
        samples = [project_polyhedron(cone, y, ctx.tol)[0] for y in rng.normal(size=(100, d)) * 2.0]
        if not partition_check(cone, samples, enumerate_faces(cone, ctx.tol), ctx.tol).ok:
            bad += 1
    return worst <= 1e-8 and bad == 0, f"max face-span residual {_fmt(worst)} (<= 1e-8), partition failures {bad}/100"


def _random_polyhedron(rng: np.random.Generator) -> HalfspaceSystem:
    d = int(rng.integers(2, 6))
    m = int(rng.integers(1, 7))
    A = rng.normal(size=(m, d))
    if rng.random() < 0.5:
        # rows confined to a proper subspace, so K is nontrivial
        k = int(rng.integers(1, d))
        A = A[:, :k] @ rng.normal(size=(k, d))
    z = rng.normal(size=d)
    beta = A @ z + rng.exponential(size=m) * (rng.random(m) < 0.7)
    return HalfspaceSystem(A, beta)


def c9_decomposition(ctx: Context):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        sys = _random_polyhedron(rng)
        x = rng.normal(size=sys.dim) * 2.0
        worst = max(worst, decompose_projection(sys, x, ctx.tol)[2])
    return worst <= 1e-12, f"max decomposition residual {_fmt(worst)} (<= 1e-12)"


def _psi_instance(rng: np.random.Generator):
    fam = FlatFamily(float(rng.uniform(0.5, 2.0)), int(rng.choice([2, 4, 6])))
    s = float(rng.uniform(-0.5, 2.0))
    y1 = float(rng.uniform(-1.5, 1.5)) * fam.delta * max(abs(s), 0.5)
    y2 = float(rng.normal()) * 0.5
    return fam, np.array([y1, y2, s])


def c10_psi(ctx: Context):
    rng = np.random.default_rng(10)
    tol = ctx.tol
    worst_d = worst_fd = 0.0
    grid_fail = 0
    for _ in range(200):
        fam, pt = _psi_instance(rng)
        y, s = pt[:2], float(pt[2])
        res = project_homogenized_cone(fam, pt, tol)
        a = res.alpha_star
        if a > 0:
            worst_d = max(worst_d, abs(psi_derivative(fam, y, s, a, tol)))
        best = psi_value(fam, y, s, a, tol)
        grid = np.linspace(0.0, 4.0 * max(a, abs(s), 0.25), 50)
        g_min = min(psi_value(fam, y, s, float(g), tol) for g in grid)
        if best > g_min + 1e-15 * max(1.0, g_min):
            grid_fail += 1
        al = float(rng.uniform(0.2, 2.0)) * max(a, 0.25)
        h = 1e-5
        fd = (psi_value(fam, y, s, al + h, tol) - psi_value(fam, y, s, al - h, tol)) / (2 * h)
        worst_fd = max(worst_fd, abs(fd - psi_derivative(fam, y, s, al, tol)))
    ok = worst_d <= 10 * DEFAULT_TOL.root_tol and grid_fail == 0 and worst_fd <= 1e-6
    return ok, (f"max |Psi'(alpha*)| {_fmt(worst_d)} (<= 1e-13), grid wins {200 - grid_fail}/200, "
                f"max finite-difference gap {_fmt(worst_fd)} (<= 1e-6)")


CRITERIA: tuple[Criterion, ...] = (
    Criterion("1", "l2", "l2 closed-form agreement", 1.0, c1_l2_closed_form),
    Criterion("2", "l2", "l2 lower bound", 30.0, c2_l2_lower_bound),
    Criterion("3", "flat", "flat recurrence fidelity", 60.0, c3_flat_fidelity),
    Criterion("4a", "flat", "flat asymptotic ratios", None, c4a_flat_ratios),
    Criterion("4b", "flat", "flat gamma=1 growth", None, c4b_flat_growth),
    Criterion("4c", "flat", "flat gamma=2 tail", None, c4c_flat_tail),
    Criterion("5", "conified", "conified structure", 300.0, c5_conified),
    Criterion("6", "cross", "cross-section consistency", None, c6_cross_section),
    Criterion("7", "polyhedral", "polyhedral positive case", 10.0, c7_polyhedral),
    Criterion("8", "faces", "face machinery", 30.0, c8_faces),
    Criterion("9", "decomposition", "decomposition identity", 10.0, c9_decomposition),
    Criterion("10", "psi", "Psi solver certification", 30.0, c10_psi),
)

FAMILIES = tuple(dict.fromkeys(c.family for c in CRITERIA))


def run_criterion(crit: Criterion, ctx: Context) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        passed, detail = crit.check(ctx)
    except Exception as exc:  # noqa: BLE001 - a crash is a failed criterion
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if crit.budget is not None and dt > crit.budget:
        passed, detail = False, detail + f"; over runtime budget {crit.budget:g}s"
    return CriterionResult(crit.key, crit.family, crit.title, bool(passed), detail, dt, crit.budget)


def run_all(only=None, tol: Tolerances = DEFAULT_TOL, ctx: Context | None = None) -> list[CriterionResult]:
    ctx = ctx or Context(tol)
    chosen = [c for c in CRITERIA if not only or c.family in only]
    return [run_criterion(c, ctx) for c in chosen]


def criterion(key: str) -> Criterion:
    for c in CRITERIA:
        if c.key == key:
            return c
    raise KeyError(key)


__all__ = ["CRITERIA", "FAMILIES", "Context", "Criterion", "CriterionResult", "criterion", "run_all", "run_criterion"]
