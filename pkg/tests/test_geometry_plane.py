import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graspforge.errors import DegenerateSet
from graspforge.geometry import principal_axes_2d, project_to_plane


def _rectangle_points(width, height, n=400, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.5, 0.5, size=(n, 2))
    return pts * np.array([width, height])


class TestPrincipalAxes:
    def test_rectangle_minor_is_short_side(self):
        axes = principal_axes_2d(_rectangle_points(2.0, 1.0))
        assert abs(axes.minor @ np.array([0.0, 1.0])) > 0.999
        assert not axes.degenerate
        assert axes.variances[0] >= axes.variances[1]

    def test_rotated_rectangle(self):
        pts = _rectangle_points(2.0, 1.0)
        angle = np.radians(30.0)
        rot = np.array(
            [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        )
        axes0 = principal_axes_2d(pts)
        axes1 = principal_axes_2d(pts @ rot.T)
        rotated_minor = rot @ axes0.minor
        assert min(
            np.linalg.norm(axes1.minor - rotated_minor),
            np.linalg.norm(axes1.minor + rotated_minor),
        ) < 1e-6

    def test_circle_degenerate_flag(self):
        t = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
        pts = np.stack([np.cos(t), np.sin(t)], axis=1)
        axes = principal_axes_2d(pts)
        assert axes.degenerate

    def test_collinear_raises(self):
        pts = np.stack([np.linspace(0, 1, 50), np.zeros(50)], axis=1)
        with pytest.raises(DegenerateSet):
            principal_axes_2d(pts)

    def test_coincident_raises(self):
        with pytest.raises(DegenerateSet):
            principal_axes_2d(np.ones((10, 2)))

    def test_sign_convention(self):
        axes = principal_axes_2d(_rectangle_points(3.0, 1.0))
        first_nonzero = axes.major[np.nonzero(axes.major)[0][0]]
        assert first_nonzero > 0

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-np.pi, np.pi), st.integers(0, 1000))
    def test_equivariance_under_rotation(self, angle, seed):
        pts = _rectangle_points(2.0, 0.7, seed=seed)
        rot = np.array(
            [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        )
        a0 = principal_axes_2d(pts)
        a1 = principal_axes_2d(pts @ rot.T)
        np.testing.assert_allclose(a0.variances, a1.variances, rtol=1e-9, atol=1e-12)
        rotated = rot @ a0.minor
        assert min(
            np.linalg.norm(a1.minor - rotated), np.linalg.norm(a1.minor + rotated)
        ) < 1e-7


class TestProjectToPlane:
    def test_in_plane_distances_preserved(self):
        rng = np.random.default_rng(1)
        normal = rng.normal(size=3)
        normal /= np.linalg.norm(normal)
        u = np.cross(normal, [1.0, 0.0, 0.0])
        u /= np.linalg.norm(u)
        v = np.cross(normal, u)
        coeffs = rng.normal(size=(30, 2))
        pts = coeffs[:, :1] * u + coeffs[:, 1:] * v
        proj = project_to_plane(pts, normal)
        orig = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        flat = np.linalg.norm(proj.coords[:, None] - proj.coords[None, :], axis=2)
        np.testing.assert_allclose(flat, orig, atol=1e-12)

    def test_z_normal_drops_z(self):
        rng = np.random.default_rng(2)
        pts = rng.normal(size=(20, 3))
        proj = project_to_plane(pts, np.array([0.0, 0.0, 1.0]))
        centered = pts - pts.mean(axis=0)
        dist_2d = np.linalg.norm(proj.coords, axis=1)
        dist_xy = np.linalg.norm(centered[:, :2], axis=1)
        np.testing.assert_allclose(dist_2d, dist_xy, atol=1e-12)

    def test_round_trip_lies_on_centroid_plane(self):
        rng = np.random.default_rng(3)
        pts = rng.normal(size=(25, 3))
        normal = rng.normal(size=3)
        normal /= np.linalg.norm(normal)
        proj = project_to_plane(pts, normal)
        lifted = proj.lift()
        offsets = (lifted - pts.mean(axis=0)) @ normal
        np.testing.assert_allclose(offsets, 0.0, atol=1e-12)

    def test_basis_right_handed(self):
        normal = np.array([0.36, -0.48, 0.8])
        proj = project_to_plane(np.zeros((1, 3)), normal)
        cross = np.cross(proj.basis_u, proj.basis_v)
        np.testing.assert_allclose(cross, normal, atol=1e-12)

    def test_rejects_non_unit_normal(self):
        with pytest.raises(ValueError):
            project_to_plane(np.zeros((3, 3)), np.array([0.0, 0.0, 2.0]))
