import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from projlab.geometry import (
    DEFAULT_TOL,
    DimensionError,
    OrthoBasis,
    Tolerances,
    as_point,
    null_space,
    orthogonal_complement,
    orthonormalize,
    project_affine,
    project_subspace,
    safe_norm,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vectors(d_max=5, n_max=5):
    return st.integers(1, d_max).flatmap(
        lambda d: st.lists(arrays(float, d, elements=finite), min_size=1, max_size=n_max)
    )


def test_default_tolerances():
    t = DEFAULT_TOL
    assert (t.ortho_tol, t.active_tol, t.root_tol, t.equality_tol) == (1e-12, 1e-9, 1e-14, 1e-8)


@pytest.mark.parametrize("kw", [{"root_tol": 0.0}, {"active_tol": -1.0}, {"root_tol": 1e-6, "equality_tol": 1e-8}])
def test_tolerances_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        Tolerances(**kw)


def test_as_point_validation():
    assert as_point([1, 2]).dtype == float
    with pytest.raises(DimensionError):
        as_point([1, 2], 3)
    with pytest.raises(ValueError):
        as_point([np.nan, 1.0])


def test_orthobasis_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        OrthoBasis(np.array([[1.0, 1.0]]), 2)


def test_orthonormalize_drops_dependent_vectors():
    b = orthonormalize([[1, 0, 0], [2, 0, 0], [1, 1, 0]])
    assert b.dim == 2
    assert b.is_orthonormal(1e-14)


def test_empty_basis_needs_ambient_dim():
    with pytest.raises(DimensionError):
        orthonormalize([])
    assert orthonormalize([], ambient_dim=3).dim == 0


@given(vectors())
def test_orthonormalize_spans_inputs(vs):
    b = orthonormalize(vs)
    assert b.is_orthonormal(1e-10)
    for v in vs:
        assert np.linalg.norm(v - project_subspace(b, v)) <= 1e-8 * max(1.0, np.linalg.norm(v))


@given(vectors())
def test_complement_is_orthogonal_and_completes(vs):
    b = orthonormalize(vs)
    c = orthogonal_complement(b)
    d = b.ambient_dim
    assert b.dim + c.dim == d
    if b.dim and c.dim:
        assert np.abs(b.vectors @ c.vectors.T).max() < 1e-10


@given(vectors(), st.integers(0, 2**31))
def test_subspace_projection_idempotent_and_orthogonal(vs, seed):
    b = orthonormalize(vs)
    x = np.random.default_rng(seed).normal(size=b.ambient_dim)
    p = project_subspace(b, x)
    assert np.allclose(project_subspace(b, p), p, atol=1e-12)
    assert abs((x - p) @ p) <= 1e-10 * max(1.0, x @ x)


def test_null_space():
    k = null_space([[1.0, 1.0, 0.0]], 3)
    assert k.dim == 2
    assert np.abs(k.vectors @ np.array([1.0, 1.0, 0.0])).max() < 1e-14


def test_affine_projection():
    b = orthonormalize([[1.0, 0.0]])
    assert np.allclose(project_affine(b, [0.0, 1.0], [3.0, 5.0]), [3.0, 1.0])


def test_safe_norm_extreme_scales():
    assert safe_norm(np.array([3e-200, 4e-200])) == pytest.approx(5e-200, rel=1e-15)
    assert safe_norm(np.array([3e200, 4e200])) == pytest.approx(5e200, rel=1e-15)
    assert safe_norm(np.zeros(3)) == 0.0
