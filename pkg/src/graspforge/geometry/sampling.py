"""Deterministic area-weighted surface sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyMesh, EmptySamples
from .mesh import TriangleMesh


@dataclass(frozen=True)
class SurfaceSamples:
    """Point set sampled on a mesh surface.

    points: (N, 3) positions; triangle_ids: (N,) source triangle per point;
    seed: RNG seed used, so the set can be regenerated bit-identically.
    """

    points: np.ndarray
    triangle_ids: np.ndarray
    seed: int

    def __len__(self) -> int:
        return len(self.points)

    @property
    def centroid(self) -> np.ndarray:
        if len(self.points) == 0:
            raise EmptySamples("centroid of empty sample set")
        return self.points.mean(axis=0)


def sample_surface(mesh: TriangleMesh, n: int, seed: int) -> SurfaceSamples:
    """Draw n points area-weighted across triangles, uniform within each.

    A counter-based generator (Philox) keyed by the seed makes the result a
    pure function of (mesh, n, seed), independent of thread count or call
    order.
    """
    if n < 0:
        raise ValueError(f"sample count must be non-negative, got {n}")
    areas = mesh.triangle_areas()
    total = areas.sum()
    if total <= 0.0:
        raise EmptyMesh("mesh has no surface area to sample")
    if n == 0:
        return SurfaceSamples(
            points=np.zeros((0, 3)), triangle_ids=np.zeros(0, dtype=np.int64), seed=seed
        )
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = rng.random((n, 3))
    cdf = np.cumsum(areas)
    cdf /= cdf[-1]
    tri_ids = np.searchsorted(cdf, u[:, 0], side="right")
    tri_ids = np.minimum(tri_ids, len(areas) - 1)
    tv = mesh.triangle_vertices[tri_ids]
    # Square-root reparameterization gives uniform barycentric coordinates.
    r1 = np.sqrt(u[:, 1])[:, None]
    r2 = u[:, 2][:, None]
    points = (1.0 - r1) * tv[:, 0] + r1 * (1.0 - r2) * tv[:, 1] + r1 * r2 * tv[:, 2]
    points.setflags(write=False)
    tri_ids = tri_ids.astype(np.int64)
    tri_ids.setflags(write=False)
    return SurfaceSamples(points=points, triangle_ids=tri_ids, seed=seed)


def furthest_point_along(
    samples: SurfaceSamples, center: np.ndarray, direction: np.ndarray
) -> tuple[np.ndarray, float, int]:
    """Sample maximizing dot(p - center, direction); ties go to the lowest index.

    Returns (point, projected distance, sample index). The direction must be
    normalized.
    """
    if len(samples) == 0:
        raise EmptySamples("furthest_point_along on empty sample set")
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    proj = (samples.points - np.asarray(center, dtype=float)) @ direction
    idx = int(np.argmax(proj))  # argmax returns the first (lowest) maximizer
    return samples.points[idx].copy(), float(proj[idx]), idx
