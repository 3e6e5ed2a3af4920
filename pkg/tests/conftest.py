"""Shared fixtures; the heavier artifacts are session-scoped."""

import itertools

import numpy as np
import pytest

from graspforge.geometry import ProximityIndex, primitives, sample_surface
from graspforge.graspopt import OptimizerConfig, optimize_finger_pregrasp
from graspforge.handmodel import build_test_asset


@pytest.fixture(scope="session")
def asset():
    return build_test_asset()


@pytest.fixture(scope="session")
def config():
    return OptimizerConfig()


@pytest.fixture(scope="session")
def theta_pre(asset, config):
    return optimize_finger_pregrasp(asset, config)


@pytest.fixture(scope="session")
def icosphere_small():
    return primitives.icosphere(0.04, 3)


@pytest.fixture(scope="session")
def icosphere_unit():
    return primitives.icosphere(1.0, 3)


@pytest.fixture(scope="session")
def suite_meshes():
    return {
        "sphere": primitives.icosphere(0.04, 3),
        "box": primitives.box(0.04, 0.20, 0.04),
        "cylinder": primitives.cylinder(0.03, 0.20),
    }


@pytest.fixture(scope="session")
def canonical_directions():
    dirs = [np.array(v, dtype=float) for v in itertools.product([1, -1], repeat=3)]
    return [d / np.linalg.norm(d) for d in dirs]


@pytest.fixture(scope="session")
def sphere_index(icosphere_small):
    samples = sample_surface(icosphere_small, 3000, 7)
    return ProximityIndex(icosphere_small, samples)


def brute_force_closest(mesh, query):
    """Exhaustive closest-point scan used as the oracle for index queries."""
    from graspforge.geometry.queries import closest_point_on_triangles

    tv = mesh.triangle_vertices
    pts = closest_point_on_triangles(
        np.broadcast_to(np.asarray(query, dtype=float), (len(tv), 3)).copy(), tv
    )
    dists = np.linalg.norm(pts - np.asarray(query, dtype=float), axis=1)
    best = int(np.argmin(dists))
    return pts[best], float(dists[best]), best


def ray_parity_oracle(points, mesh, direction=None, seed=99):
    """Independent inside test: Moller-Trumbore crossings along a fixed
    random ray direction."""
    rng = np.random.default_rng(seed)
    if direction is None:
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
    tv = mesh.triangle_vertices
    v0, v1, v2 = tv[:, 0], tv[:, 1], tv[:, 2]
    e1 = v1 - v0
    e2 = v2 - v0
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    mask = np.zeros(len(points), dtype=bool)
    h = np.cross(direction, e2)
    a = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(a) > 1e-14
    for i, p in enumerate(points):
        s = p - v0
        f = np.where(ok, 1.0 / np.where(ok, a, 1.0), 0.0)
        u = f * np.einsum("ij,ij->i", s, h)
        q = np.cross(s, e1)
        v = f * (q @ direction)
        t = f * np.einsum("ij,ij->i", e2, q)
        hit = ok & (u >= 0) & (u <= 1) & (v >= 0) & (u + v <= 1) & (t > 1e-14)
        mask[i] = bool(hit.sum() % 2)
    return mask
