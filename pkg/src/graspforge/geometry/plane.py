"""Plane projection and closed-form 2D principal axes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSet

# Minor/major variance ratio above which the projection is treated as
# isotropic and no meaningful narrow direction exists.
ISOTROPY_RATIO = 0.98
# Variance below this (relative to major) means a collinear point set.
COLLINEAR_RATIO = 1e-12


@dataclass(frozen=True)
class PrincipalAxes2D:
    """Eigen-structure of a 2x2 covariance.

    major/minor are unit 2-vectors with variances[0] >= variances[1];
    degenerate is set when the variance ratio exceeds ISOTROPY_RATIO.
    """

    major: np.ndarray
    minor: np.ndarray
    variances: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class PlaneProjection:
    """2D coordinates of points in the plane through their centroid.

    (basis_u, basis_v, normal) is a right-handed orthonormal triple; the
    projection of p is ((p - origin) . u, (p - origin) . v).
    """

    coords: np.ndarray
    basis_u: np.ndarray
    basis_v: np.ndarray
    normal: np.ndarray
    origin: np.ndarray

    def lift(self, coords: np.ndarray | None = None) -> np.ndarray:
        """Map 2D coordinates back to 3D points on the plane."""
        c = self.coords if coords is None else np.asarray(coords, dtype=float)
        return self.origin + c[:, :1] * self.basis_u + c[:, 1:2] * self.basis_v

    def to_3d_direction(self, direction_2d: np.ndarray) -> np.ndarray:
        d = np.asarray(direction_2d, dtype=float)
        return d[0] * self.basis_u + d[1] * self.basis_v


def plane_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic right-handed orthonormal basis (u, v) of the plane
    orthogonal to a unit normal."""
    normal = np.asarray(normal, dtype=float)
    helper = (
        np.array([0.0, 0.0, 1.0]) if abs(normal[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    )
    u = np.cross(helper, normal)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


def project_to_plane(points: np.ndarray, normal: np.ndarray) -> PlaneProjection:
    """Project 3D points onto the plane orthogonal to a unit normal.

    In-plane distances are preserved exactly; the plane passes through the
    centroid of the input points.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    normal = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(normal) - 1.0) > 1e-9:
        raise ValueError("normal must be a unit vector")
    u, v = plane_basis(normal)
    origin = points.mean(axis=0) if len(points) else np.zeros(3)
    centered = points - origin
    coords = np.stack([centered @ u, centered @ v], axis=1)
    return PlaneProjection(coords=coords, basis_u=u, basis_v=v, normal=normal, origin=origin)


def principal_axes_2d(points: np.ndarray) -> PrincipalAxes2D:
    """Closed-form eigen-decomposition of the 2x2 covariance of a point set.

    The minor direction is the lower-variance component. Direction signs are
    fixed so the first nonzero coordinate is positive. Raises DegenerateSet
    when the points are collinear or coincident.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) < 3:
        raise DegenerateSet(f"need at least 3 points, got {len(points)}")
    centered = points - points.mean(axis=0)
    cov = centered.T @ centered / len(points)
    a, b, c = cov[0, 0], cov[0, 1], cov[1, 1]
    # Eigenvalues of [[a, b], [b, c]].
    half_trace = 0.5 * (a + c)
    disc = np.sqrt(max(0.25 * (a - c) ** 2 + b * b, 0.0))
    lam_major = half_trace + disc
    lam_minor = half_trace - disc
    if lam_major <= 0.0:
        raise DegenerateSet("all points coincident")
    if lam_minor / lam_major < COLLINEAR_RATIO:
        raise DegenerateSet("points are collinear")
    if disc < 1e-15 * max(lam_major, 1e-300):
        # Isotropic covariance: any orthonormal pair is valid.
        major = np.array([1.0, 0.0])
        minor = np.array([0.0, 1.0])
    else:
        # Eigenvector for lam_major; pick the better-conditioned row.
        cand1 = np.array([b, lam_major - a])
        cand2 = np.array([lam_major - c, b])
        major = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
        major = major / np.linalg.norm(major)
        minor = np.array([-major[1], major[0]])
    major = _fix_sign(major)
    minor = _fix_sign(minor)
    degenerate = bool(lam_minor / lam_major > ISOTROPY_RATIO)
    return PrincipalAxes2D(
        major=major,
        minor=minor,
        variances=np.array([lam_major, lam_minor]),
        degenerate=degenerate,
    )


def _fix_sign(direction: np.ndarray) -> np.ndarray:
    for value in direction:
        if value != 0.0:
            return direction if value > 0.0 else -direction
    return direction
