import math

import numpy as np
import pytest

from projlab.experiments import (
    ConifiedRunSpec,
    FlatRunSpec,
    L2CounterexampleSpec,
    conified_run,
    flat_gamma_sums,
    flat_recurrence_run,
    l2_closed_form,
    l2_simulated,
    l2_step_norm_sq,
    l2_step_norms,
    lower_bound,
    max_closed_form_deviation,
    positive_polyhedral_run,
)
from projlab.experiments.l2 import subspaces
from projlab.projectors import FlatFamily, project

FAM = FlatFamily(1.0, 2)


# l2 -----------------------------------------------------------------------


def test_l2_first_even_iterate_oracle():
    # (1/2)^(1/(2e))
    even = l2_closed_form(L2CounterexampleSpec(1), 1)[1]
    assert even[1] == pytest.approx(0.8802957937590925, abs=1e-16)
    assert even[1] == pytest.approx(0.5 ** (1 / (2 * math.e)), rel=1e-15)


def test_lower_bound_at_three():
    assert lower_bound(3) == pytest.approx(0.004094375705767960, rel=1e-15)
    assert lower_bound(3) == pytest.approx(1 / (6 * (math.log(3) + 1) ** 5), rel=1e-15)


def test_l2_even_coordinates_vanish():
    spec = L2CounterexampleSpec(8)
    odd, even = l2_closed_form(spec, 5)
    assert np.all(even[0::2] == 0.0)
    assert odd[0] == 0.0
    with pytest.raises(ValueError):
        l2_closed_form(spec, 0)


def test_l2_single_tier_matches_subtraction():
    spec = L2CounterexampleSpec(1)
    for n in (1, 2, 10, 500):
        odd, even = l2_closed_form(spec, n)
        direct = float(np.sum((even - odd) ** 2))
        assert l2_step_norm_sq(spec, n).norm_sq == pytest.approx(direct, rel=1e-12)


def test_l2_coordinates_decay_at_one_million():
    spec = L2CounterexampleSpec(30)
    n = 10**6
    odd, _ = l2_closed_form(spec, n)
    k = spec.k
    # cos^{2n} t_k = (k/(k+1))^{n/(2 e^k)}
    bound = spec.weights * (k / (k + 1)) ** (n / (2 * np.exp(k)))
    assert np.all(odd[1::2] <= bound * (1 + 1e-12))
    assert np.all(odd[1::2] < spec.weights)


def test_l2_interleaved_norms_match_scalar_path():
    spec = L2CounterexampleSpec(12)
    norms = l2_step_norms(spec, 40, chunk=7)
    for n in (1, 3, 40):
        assert norms[2 * n - 1] ** 2 == pytest.approx(l2_step_norm_sq(spec, n).norm_sq, rel=1e-13)


def test_l2_simulation_and_idempotence():
    spec = L2CounterexampleSpec(5)
    traj = l2_simulated(spec, 50)
    assert max_closed_form_deviation(spec, traj) < 1e-10
    assert np.array_equal(traj.points[0], spec.x0())
    L1, _ = subspaces(spec)
    x1 = traj.points[1]
    assert np.linalg.norm(project(L1, x1) - x1) < 1e-15


def test_l2_validation():
    with pytest.raises(ValueError):
        L2CounterexampleSpec(0)
    with pytest.raises(ValueError):
        l2_simulated(L2CounterexampleSpec(51), 1)


def test_l2_thetas_decrease():
    th = L2CounterexampleSpec(20).theta
    assert np.all(np.diff(th) < 0) and th[-1] > 0


# flat R^2 -----------------------------------------------------------------


def test_flat_recurrence_inverts_forward_step():
    # forward value 0.5 + f(0.5) f'(0.5) = 0.5 + 16 e^-8
    prev = 0.5 + 16 * math.exp(-8.0)
    assert prev == pytest.approx(0.505367402046440189, abs=1e-15)
    run = flat_recurrence_run(FlatRunSpec(FAM, prev, 1))
    assert run.u[1] == pytest.approx(0.5, abs=1e-14)


def test_flat_step_norm_identities():
    run = flat_recurrence_run(FlatRunSpec(FAM, 0.5, 50))
    u = run.u[1:]
    f = np.exp(-(u**-2.0))
    fp = 2 * u**-3.0 * f
    assert np.allclose(run.even_step_norms, f, rtol=1e-15, atol=0)
    assert np.allclose(run.step_norms[0::2], f * np.sqrt(1 + fp**2), rtol=1e-15, atol=0)
    assert np.max(run.residuals) <= 1e-13


def test_flat_first_step_matches_2d_projection():
    run = flat_recurrence_run(FlatRunSpec(FAM, 0.5, 1))
    from projlab.projectors import Epigraph

    p = project(Epigraph(FAM), [0.5, 0.0])
    assert run.u[1] == pytest.approx(p[0], abs=1e-15)
    assert p[1] == pytest.approx(0.016960565700996265, rel=1e-14)


def test_flat_near_domain_edge_decreases():
    # for beta=1, r=2 the decreasing-interval bound (2/3)^(1/2) equals delta
    u0 = FAM.delta * (1 - 1e-9)
    run = flat_recurrence_run(FlatRunSpec(FAM, u0, 200))
    assert np.all(np.diff(run.u) < 0)


def test_flat_spec_validation():
    with pytest.raises(ValueError):
        FlatRunSpec(FAM, 0.9)
    with pytest.raises(ValueError):
        FlatRunSpec(FAM, 0.0)
    with pytest.raises(ValueError):
        FlatRunSpec(FAM, 0.5, -1)


def test_flat_gamma_sums_use_pairs():
    run = flat_recurrence_run(FlatRunSpec(FAM, 0.5, 100))
    s = flat_gamma_sums(run, [1.0], [10, 100])
    assert s.at(1.0, 10) == math.fsum(run.step_norms[:20].tolist())


# conified R^3 -----------------------------------------------------------------


@pytest.fixture(scope="module")
def conified():
    return conified_run(ConifiedRunSpec(FAM, 1.0, 0.3, 300))


def test_conified_structure(conified):
    assert np.all(np.diff(conified.a) >= 0)
    assert np.all(np.diff(conified.b) < 0)
    assert np.all(conified.alpha_star > 0)
    assert np.max(conified.ratio_identity_residuals()) <= 1e-10
    assert np.max(conified.abscissa_residuals()) <= 1e-10
    ratios = conified.a[:-1] / conified.a[1:]
    assert np.all((ratios > 0) & (ratios <= 1))


def test_conified_iterate_shape(conified):
    pts = conified.traj.points
    n = 7
    assert np.allclose(pts[2 * n], conified.a[n] * np.array([conified.b[n], 0.0, 1.0]), rtol=1e-14)
    f = math.exp(-conified.b[n + 1] ** -2)
    odd = pts[2 * n + 1] / conified.alpha_star[n]
    assert odd[1] == pytest.approx(f, rel=1e-9)


def test_conified_validation():
    with pytest.raises(ValueError):
        ConifiedRunSpec(FAM, 1.0, 1.0)
    with pytest.raises(ValueError):
        ConifiedRunSpec(FAM, 0.0, 0.3)


# polyhedral ------------------------------------------------------------------


def test_polyhedral_seed_one_regression():
    run = positive_polyhedral_run(1)
    assert all(t < 1e-6 for t in run.tails.values())
    # frozen from the first validated run
    assert run.tails[0.25] == pytest.approx(8.536e-22, rel=1e-3)
    again = positive_polyhedral_run(1)
    assert np.array_equal(run.traj.step_norms, again.traj.step_norms)


def test_polyhedral_seeds_differ():
    a = positive_polyhedral_run(1, n_steps=50)
    b = positive_polyhedral_run(2, n_steps=50)
    assert not np.array_equal(a.traj.step_norms, b.traj.step_norms)
