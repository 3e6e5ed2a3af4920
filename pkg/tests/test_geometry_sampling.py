import numpy as np
import pytest

from graspforge.errors import EmptySamples
from graspforge.geometry import furthest_point_along, primitives, sample_surface


def _expected_mean_radius(mesh, points_per_edge=10):
    """Quadrature oracle: area-weighted mean distance from the origin for
    points uniform on the faceted surface."""
    tv = mesh.triangle_vertices
    areas = mesh.triangle_areas()
    # Uniform barycentric grid, identical weight per node.
    nodes = []
    n = points_per_edge
    for i in range(n):
        for j in range(n - i):
            k = n - 1 - i - j
            nodes.append((i + 1 / 3, j + 1 / 3, k + 1 / 3))
    bary = np.array(nodes) / n
    pts = np.einsum("bk,tkj->tbj", bary, tv)
    norms = np.linalg.norm(pts, axis=2).mean(axis=1)
    return float((norms * areas).sum() / areas.sum())


def test_sphere_mean_radius_matches_quadrature(icosphere_unit):
    samples = sample_surface(icosphere_unit, 3000, seed=7)
    expected = _expected_mean_radius(icosphere_unit)
    observed = np.linalg.norm(samples.points, axis=1).mean()
    assert abs(observed - expected) < 1e-2


def test_zero_samples(icosphere_unit):
    samples = sample_surface(icosphere_unit, 0, seed=3)
    assert len(samples) == 0


def test_sampling_deterministic(icosphere_unit):
    a = sample_surface(icosphere_unit, 500, seed=42)
    b = sample_surface(icosphere_unit, 500, seed=42)
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.triangle_ids, b.triangle_ids)
    c = sample_surface(icosphere_unit, 500, seed=43)
    assert not np.array_equal(a.points, c.points)


def test_points_lie_on_source_triangles(icosphere_unit):
    samples = sample_surface(icosphere_unit, 200, seed=5)
    tv = icosphere_unit.triangle_vertices[samples.triangle_ids]
    # Solve barycentric coordinates and check the residual.
    for p, tri in zip(samples.points, tv):
        a, b, c = tri
        m = np.stack([b - a, c - a], axis=1)
        uv, *_ = np.linalg.lstsq(m, p - a, rcond=None)
        recon = a + m @ uv
        assert np.linalg.norm(recon - p) < 1e-9
        assert -1e-9 <= uv[0] and -1e-9 <= uv[1] and uv.sum() <= 1 + 1e-9


def test_negative_count_rejected(icosphere_unit):
    with pytest.raises(ValueError):
        sample_surface(icosphere_unit, -1, seed=0)


class TestFurthestPoint:
    def test_cube_face(self):
        cube = primitives.box(1.0, 1.0, 1.0, segments=4)
        samples = sample_surface(cube, 5000, seed=11)
        _, dist, _ = furthest_point_along(samples, np.zeros(3), np.array([1.0, 0, 0]))
        assert abs(dist - 0.5) < 1e-3

    def test_tie_goes_to_lowest_index(self):
        from graspforge.geometry.sampling import SurfaceSamples

        pts = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.5, 0.0, 0.0]])
        samples = SurfaceSamples(
            points=pts, triangle_ids=np.zeros(3, dtype=np.int64), seed=0
        )
        _, dist, idx = furthest_point_along(samples, np.zeros(3), np.array([1.0, 0, 0]))
        assert idx == 0 and dist == 1.0

    def test_matches_brute_force(self, icosphere_unit):
        samples = sample_surface(icosphere_unit, 1000, seed=2)
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            center = rng.normal(size=3) * 0.2
            point, dist, idx = furthest_point_along(samples, center, d)
            proj = (samples.points - center) @ d
            assert idx == int(np.argmax(proj))
            assert dist == pytest.approx(proj.max(), abs=0)

    def test_empty_raises(self):
        from graspforge.geometry.sampling import SurfaceSamples

        empty = SurfaceSamples(
            points=np.zeros((0, 3)), triangle_ids=np.zeros(0, dtype=np.int64), seed=0
        )
        with pytest.raises(EmptySamples):
            furthest_point_along(empty, np.zeros(3), np.array([1.0, 0, 0]))

    def test_requires_unit_direction(self, icosphere_unit):
        samples = sample_surface(icosphere_unit, 10, seed=1)
        with pytest.raises(ValueError):
            furthest_point_along(samples, np.zeros(3), np.array([2.0, 0, 0]))
