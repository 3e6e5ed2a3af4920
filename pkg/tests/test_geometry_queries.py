import numpy as np
import pytest

from graspforge.geometry import (
    ProximityIndex,
    classify_inside,
    primitives,
    sample_surface,
    winding_numbers,
)
from graspforge.geometry.mesh import TriangleMesh
from graspforge.rotations import aa_to_matrix

from conftest import brute_force_closest, ray_parity_oracle


@pytest.fixture(scope="module")
def unit_sphere_index(icosphere_unit):
    return ProximityIndex(icosphere_unit)


class TestClosestSurfacePoint:
    def test_vertex_query_distance_zero(self, icosphere_unit, unit_sphere_index):
        v = icosphere_unit.vertices[17]
        _, dist, _ = unit_sphere_index.closest_surface_point(v)
        assert dist < 1e-12

    def test_center_equals_inradius(self, icosphere_unit, unit_sphere_index):
        _, dist, tri = unit_sphere_index.closest_surface_point(np.zeros(3))
        _, expected, _ = brute_force_closest(icosphere_unit, np.zeros(3))
        assert dist == pytest.approx(expected, rel=1e-12)
        assert dist < 1.0  # strictly inside the circumscribed sphere

    def test_random_queries_match_brute_force(self, icosphere_unit, unit_sphere_index):
        rng = np.random.default_rng(123)
        queries = rng.normal(size=(100, 3)) * 1.5
        pts, dists, tris = unit_sphere_index.closest_surface_point(queries)
        for i, q in enumerate(queries):
            _, expected, tri = brute_force_closest(icosphere_unit, q)
            assert abs(dists[i] - expected) <= 1e-12 * max(1.0, expected)


class TestInside:
    def test_origin_inside_unit_sphere(self, icosphere_unit):
        res = classify_inside(np.zeros((1, 3)), icosphere_unit)
        assert res.mask[0] and not res.approximate

    def test_far_point_outside(self, icosphere_unit):
        res = classify_inside(np.array([[2.0, 0.0, 0.0]]), icosphere_unit)
        assert not res.mask[0]

    def test_cube_matches_ray_parity(self):
        cube = primitives.box(0.1, 0.1, 0.1, segments=2)
        rng = np.random.default_rng(7)
        points = rng.uniform(-0.09, 0.09, size=(500, 3))
        ours = classify_inside(points, cube).mask
        oracle = ray_parity_oracle(points, cube)
        assert np.array_equal(ours, oracle)

    def test_non_watertight_flagged_approximate(self):
        verts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
        mesh = TriangleMesh.from_arrays(verts, np.array([[0, 1, 2]]))
        res = classify_inside(np.array([[0.2, 0.2, 0.5]]), mesh)
        assert res.approximate
        assert not res.mask[0]

    def test_winding_number_values(self, icosphere_unit):
        w = winding_numbers(
            np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]),
            icosphere_unit.vertices,
            icosphere_unit.triangles,
        )
        assert w[0] == pytest.approx(1.0, abs=1e-9)
        assert w[1] == pytest.approx(0.0, abs=1e-9)

    def test_degenerate_hits_resolved(self, icosphere_unit):
        # The +z ray from the center passes exactly through a subdivision
        # vertex of the icosphere; the jitter retry must still say inside.
        res = classify_inside(np.zeros((1, 3)), icosphere_unit)
        assert res.mask[0]


class TestSignedDistance:
    def test_center_negative_inradius(self, icosphere_unit, unit_sphere_index):
        sdf = unit_sphere_index.signed_distance(np.zeros(3))
        _, inradius, _ = brute_force_closest(icosphere_unit, np.zeros(3))
        assert sdf == pytest.approx(-inradius, rel=1e-12)

    def test_outside_matches_analytic_sphere(self):
        fine = primitives.icosphere(1.0, 4)
        index = ProximityIndex(fine)
        sdf = index.signed_distance(np.array([2.0, 0.0, 0.0]))
        assert abs(sdf - 1.0) < 2e-2

    def test_surface_samples_are_zero(self, icosphere_unit, unit_sphere_index):
        samples = sample_surface(icosphere_unit, 100, seed=9)
        sdf = unit_sphere_index.signed_distance(samples.points)
        assert np.abs(sdf).max() < 1e-9

    def test_sign_change_brackets_surface(self, unit_sphere_index):
        # Bisection along a ray that crosses the surface pins the zero.
        direction = np.array([0.3, -0.5, 0.81])
        direction /= np.linalg.norm(direction)
        lo, hi = 0.0, 2.0
        f = lambda t: unit_sphere_index.signed_distance(direction * t)
        assert f(lo) < 0 < f(hi)
        while hi - lo > 1e-8:
            mid = 0.5 * (lo + hi)
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        assert hi - lo <= 1e-7
        assert abs(f(0.5 * (lo + hi))) < 1e-6


class TestNearestSample:
    def test_matches_brute_force(self, icosphere_unit):
        samples = sample_surface(icosphere_unit, 500, seed=3)
        index = ProximityIndex(icosphere_unit, samples)
        rng = np.random.default_rng(5)
        queries = rng.normal(size=(50, 3))
        ids, dists = index.nearest_sample(queries)
        for i, q in enumerate(queries):
            d = np.linalg.norm(samples.points - q, axis=1)
            assert ids[i] == int(np.argmin(d))
            assert dists[i] == pytest.approx(d.min(), rel=1e-12)


class TestIndexInvariants:
    def test_index_matches_brute_force_on_random_meshes(self):
        rng = np.random.default_rng(2024)
        bases = [
            primitives.icosphere(1.0, 2),
            primitives.box(1.0, 0.6, 0.3, segments=2),
            primitives.cylinder(0.4, 1.2, sides=24, rings=2),
        ]
        total = 0
        for trial in range(10):
            base = bases[trial % len(bases)]
            rot = aa_to_matrix(rng.normal(size=3))
            verts = base.vertices @ rot.T * rng.uniform(0.5, 2.0)
            mesh = TriangleMesh.from_arrays(verts, base.triangles)
            index = ProximityIndex(mesh)
            queries = rng.normal(size=(100, 3)) * 2.0
            _, dists, _ = index.closest_surface_point(queries)
            for q, d in zip(queries, dists):
                _, expected, _ = brute_force_closest(mesh, q)
                assert abs(d - expected) <= 1e-12 * max(1.0, expected)
                total += 1
        assert total == 1000

    def test_scale_covariance(self, tmp_path):
        from graspforge.geometry import load_mesh, save_obj

        mesh = primitives.icosphere(1.0, 2)
        path = tmp_path / "sphere.obj"
        save_obj(mesh, path)
        m1 = load_mesh(path, scale=1.0)
        m3 = load_mesh(path, scale=3.0)
        i1 = ProximityIndex(m1)
        i3 = ProximityIndex(m3)
        rng = np.random.default_rng(8)
        queries = rng.normal(size=(50, 3))
        s1 = i1.signed_distance(queries)
        s3 = i3.signed_distance(queries * 3.0)
        np.testing.assert_allclose(s3, 3.0 * s1, rtol=1e-9)
