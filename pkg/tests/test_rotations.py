import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graspforge.rotations import (
    RigidTransform,
    aa_jacobian,
    aa_jacobians,
    aa_to_matrices,
    aa_to_matrix,
    canonicalize_aa,
    interpolate_rigid,
    matrix_to_aa,
    mirror_aa,
    rotation_between,
)

unit_floats = st.floats(-3.0, 3.0, allow_nan=False)


def test_identity():
    np.testing.assert_allclose(aa_to_matrix(np.zeros(3)), np.eye(3), atol=1e-15)


def test_quarter_turn_z():
    rot = aa_to_matrix(np.array([0.0, 0.0, np.pi / 2]))
    np.testing.assert_allclose(rot @ [1, 0, 0], [0, 1, 0], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.tuples(unit_floats, unit_floats, unit_floats))
def test_matrices_are_rotations(phi):
    rot = aa_to_matrix(np.array(phi))
    np.testing.assert_allclose(rot @ rot.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.tuples(unit_floats, unit_floats, unit_floats))
def test_log_exp_round_trip(phi):
    phi = canonicalize_aa(np.array(phi))
    recovered = matrix_to_aa(aa_to_matrix(phi))
    np.testing.assert_allclose(recovered, phi, atol=1e-9)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    phis = rng.normal(size=(20, 3))
    batch = aa_to_matrices(phis)
    for i, phi in enumerate(phis):
        np.testing.assert_allclose(batch[i], aa_to_matrix(phi), atol=1e-14)
    jac_batch = aa_jacobians(phis)
    for i, phi in enumerate(phis):
        np.testing.assert_allclose(jac_batch[i], aa_jacobian(phi), atol=1e-12)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(1)
    h = 1e-7
    for _ in range(10):
        phi = rng.normal(size=3)
        jac = aa_jacobian(phi)
        for k in range(3):
            dp = np.zeros(3)
            dp[k] = h
            fd = (aa_to_matrix(phi + dp) - aa_to_matrix(phi - dp)) / (2 * h)
            np.testing.assert_allclose(jac[k], fd, atol=1e-6)


def test_jacobian_near_zero():
    jac = aa_jacobian(np.zeros(3))
    h = 1e-7
    for k in range(3):
        dp = np.zeros(3)
        dp[k] = h
        fd = (aa_to_matrix(dp) - aa_to_matrix(-dp)) / (2 * h)
        np.testing.assert_allclose(jac[k], fd, atol=1e-6)


def test_canonicalize_wraps():
    phi = np.array([0.0, 0.0, 1.5 * np.pi])
    wrapped = canonicalize_aa(phi)
    assert np.linalg.norm(wrapped) <= np.pi + 1e-9
    np.testing.assert_allclose(aa_to_matrix(wrapped), aa_to_matrix(phi), atol=1e-12)


def test_mirror_is_conjugation():
    mirror = np.diag([-1.0, 1.0, 1.0])
    rng = np.random.default_rng(2)
    for _ in range(10):
        phi = rng.normal(size=3)
        lhs = aa_to_matrix(mirror_aa(phi))
        rhs = mirror @ aa_to_matrix(phi) @ mirror
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_rotation_between():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        b = rng.normal(size=3)
        b /= np.linalg.norm(b)
        rot = rotation_between(a, b)
        np.testing.assert_allclose(rot @ a, b, atol=1e-12)
    np.testing.assert_allclose(
        rotation_between(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]))
        @ np.array([1.0, 0, 0]),
        [-1.0, 0, 0],
        atol=1e-12,
    )


class TestInterpolateRigid:
    def test_endpoints_exact(self):
        t0 = RigidTransform.from_aa(np.array([0.1, -0.2, 0.3]), np.array([1.0, 2.0, 3.0]))
        t1 = RigidTransform.from_aa(np.array([-0.4, 0.5, 0.6]), np.array([-1.0, 0.0, 2.0]))
        assert interpolate_rigid(t0, t1, 0.0).almost_equal(t0, tol=0.0)
        assert interpolate_rigid(t0, t1, 1.0).almost_equal(t1, tol=0.0)

    def test_geodesic_midpoint(self):
        t0 = RigidTransform.identity()
        t1 = RigidTransform.from_aa(np.array([0.0, 0.0, np.pi / 2]), np.zeros(3))
        mid = interpolate_rigid(t0, t1, 0.5)
        expected = aa_to_matrix(np.array([0.0, 0.0, np.pi / 4]))
        np.testing.assert_allclose(mid.rotation, expected, atol=1e-9)

    def test_half_turn_tie_break_continuous(self):
        t0 = RigidTransform.identity()
        t1 = RigidTransform.from_aa(np.array([0.0, 0.0, np.pi]), np.zeros(3))
        prev = None
        for t in np.linspace(0.0, 1.0, 11):
            cur = interpolate_rigid(t0, t1, t)
            if prev is not None:
                assert np.abs(cur.rotation - prev.rotation).max() < 0.5
            prev = cur

    def test_parameter_out_of_range(self):
        t0 = RigidTransform.identity()
        with pytest.raises(ValueError):
            interpolate_rigid(t0, t0, 1.5)


def test_rigid_compose_inverse():
    rng = np.random.default_rng(4)
    a = RigidTransform.from_aa(rng.normal(size=3), rng.normal(size=3))
    b = RigidTransform.from_aa(rng.normal(size=3), rng.normal(size=3))
    pts = rng.normal(size=(5, 3))
    np.testing.assert_allclose(
        a.compose(b).apply(pts), a.apply(b.apply(pts)), atol=1e-12
    )
    ident = a.compose(a.inverse())
    np.testing.assert_allclose(ident.rotation, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(ident.translation, np.zeros(3), atol=1e-12)
