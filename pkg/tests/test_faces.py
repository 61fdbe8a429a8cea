import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projlab.experiments import random_cone
from projlab.faces import (
    FaceLattice,
    NotInSetError,
    decompose,
    decompose_projection,
    enumerate_faces,
    face_span_projection_check,
    identify_face,
    partition_check,
)
from projlab.projectors import HalfspaceSystem, project_polyhedron, project_polyhedron_exact

QUADRANT = HalfspaceSystem.cone(-np.eye(2))


def test_quadrant_faces():
    lattice = enumerate_faces(QUADRANT)
    assert [f.active_set for f in lattice] == [(), (0,), (1,), (0, 1)]
    assert [f.dim for f in lattice] == [2, 1, 1, 0]
    assert lattice.index((1,)) == 2 and lattice.index((0, 5)) is None


def test_implied_equalities_collapse():
    # x <= 0 and -x <= 0 in R^2: the line x = 0 is the only face
    line = HalfspaceSystem.cone([[1.0, 0.0], [-1.0, 0.0]])
    lattice = enumerate_faces(line)
    assert [f.active_set for f in lattice] == [(0, 1)]
    assert lattice.faces[0].dim == 1


def test_halfplane_faces():
    half = HalfspaceSystem(np.array([[0.0, 1.0]]), np.array([1.0]))
    lattice = enumerate_faces(half)
    assert [f.active_set for f in lattice] == [(), (0,)]
    assert np.allclose(lattice.faces[1].project_hull([3.0, -2.0]), [3.0, 1.0])


def test_identify_face():
    assert identify_face(QUADRANT, [0.0, 1.0]).active_set == (0,)
    assert identify_face(QUADRANT, [0.0, 0.0]).active_set == (0, 1)
    assert identify_face(QUADRANT, [1.0, 1.0]).dim == 2
    with pytest.raises(NotInSetError):
        identify_face(QUADRANT, [-1.0, 0.0])


def test_exact_projection_returns_face():
    p, face = project_polyhedron_exact(QUADRANT, [-2.0, 3.0])
    assert np.allclose(p, [0.0, 3.0]) and face.active_set == (0,)


def test_face_equality_by_active_set():
    a = identify_face(QUADRANT, [0.0, 1.0])
    b = identify_face(QUADRANT, [0.0, 7.0])
    assert a == b and hash(a) == hash(b)


def test_decomposition_example():
    # C = {x : -x_0 <= 0}: K = {x_0 = 0}, D is the ray in K-perp
    half = HalfspaceSystem.cone([[-1.0, 0.0]])
    direct, composed, res = decompose_projection(half, [-1.0, 5.0])
    assert np.allclose(direct, [0.0, 5.0]) and np.allclose(composed, [0.0, 5.0]) and res < 1e-15
    dec = decompose(half)
    assert dec.kernel.dim == 1 and dec.kernel_perp.dim == 1


def test_decomposition_trivial_kernel_and_empty_system():
    dec = decompose(QUADRANT)
    assert dec.kernel.dim == 0
    whole = HalfspaceSystem.whole_space(3)
    assert decompose(whole).kernel.dim == 3
    assert decompose_projection(whole, [1.0, 2.0, 3.0])[2] == 0.0


def test_partition_rejects_points_outside():
    with pytest.raises(NotInSetError):
        partition_check(QUADRANT, [[-1.0, 1.0]])


def _cone(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    return rng, random_cone(rng, d, int(rng.integers(1, d + 3)))


@given(st.integers(0, 2**31))
def test_faces_are_distinct_and_witnesses_in_relint(seed):
    _, cone = _cone(seed)
    lattice = enumerate_faces(cone)
    sets = [f.active_set for f in lattice]
    assert len(set(sets)) == len(sets)
    for f in lattice:
        assert identify_face(cone, f.relint_point).active_set == f.active_set


@given(st.integers(0, 2**31))
def test_projection_lands_in_face_span(seed):
    rng, cone = _cone(seed)
    _, _, res = face_span_projection_check(cone, rng.normal(size=cone.dim) * 2)
    assert res <= 1e-8


@given(st.integers(0, 2**31))
def test_projected_samples_partition(seed):
    rng, cone = _cone(seed)
    samples = [project_polyhedron(cone, y)[0] for y in rng.normal(size=(30, cone.dim))]
    assert partition_check(cone, samples).ok


@given(st.integers(0, 2**31))
def test_decomposition_identity(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    k = int(rng.integers(1, d))
    A = rng.normal(size=(int(rng.integers(1, 5)), k)) @ rng.normal(size=(k, d))
    sys = HalfspaceSystem(A, A @ rng.normal(size=d) + rng.exponential(size=A.shape[0]))
    assert decompose(sys).kernel.dim >= d - k
    assert decompose_projection(sys, rng.normal(size=d) * 2)[2] <= 1e-12


def test_lattice_len_and_iter():
    lattice = enumerate_faces(QUADRANT)
    assert isinstance(lattice, FaceLattice) and len(lattice) == 4 and len(list(lattice)) == 4
