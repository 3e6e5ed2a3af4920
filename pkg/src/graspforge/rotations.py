"""Axis-angle rotation utilities.

Rotations are represented as 3-vectors (axis * angle, radians). All
derivative formulas here are analytic; finite differences are used only in
the test suite.
"""

from __future__ import annotations

import numpy as np

_TINY_ANGLE = 1e-8


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x such that skew(v) @ u == cross(v, u)."""
    v = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def aa_to_matrix(phi: np.ndarray) -> np.ndarray:
    """Rodrigues formula for a single axis-angle vector."""
    phi = np.asarray(phi, dtype=float)
    angle = float(np.linalg.norm(phi))
    k = skew(phi)
    if angle < _TINY_ANGLE:
        # Second-order Taylor expansion keeps derivatives smooth near zero.
        return np.eye(3) + k + 0.5 * (k @ k)
    a = np.sin(angle) / angle
    b = (1.0 - np.cos(angle)) / (angle * angle)
    return np.eye(3) + a * k + b * (k @ k)


def aa_to_matrices(phis: np.ndarray) -> np.ndarray:
    """Vectorized Rodrigues formula: (N, 3) rotation vectors -> (N, 3, 3)."""
    phis = np.asarray(phis, dtype=float).reshape(-1, 3)
    n = phis.shape[0]
    angles = np.linalg.norm(phis, axis=1)
    out = np.empty((n, 3, 3))
    ks = np.zeros((n, 3, 3))
    ks[:, 0, 1] = -phis[:, 2]
    ks[:, 0, 2] = phis[:, 1]
    ks[:, 1, 0] = phis[:, 2]
    ks[:, 1, 2] = -phis[:, 0]
    ks[:, 2, 0] = -phis[:, 1]
    ks[:, 2, 1] = phis[:, 0]
    kk = ks @ ks
    small = angles < _TINY_ANGLE
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(small, 1.0, np.sin(angles) / np.where(small, 1.0, angles))
        b = np.where(
            small, 0.5, (1.0 - np.cos(angles)) / np.where(small, 1.0, angles**2)
        )
    out[:] = np.eye(3)
    out += a[:, None, None] * ks
    out += b[:, None, None] * kk
    return out


def aa_jacobian(phi: np.ndarray) -> np.ndarray:
    """Derivative of R(phi) with respect to the rotation vector.

    Returns a (3, 3, 3) array J with J[k] = dR/dphi_k, using the closed
    form d R / d phi_k = (phi_k [phi]x + [phi x (I - R) e_k]x) / |phi|^2 R.
    """
    phi = np.asarray(phi, dtype=float)
    angle2 = float(phi @ phi)
    rot = aa_to_matrix(phi)
    jac = np.empty((3, 3, 3))
    if angle2 < _TINY_ANGLE**2:
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1.0
            jac[k] = skew(e)
        return jac
    eye = np.eye(3)
    for k in range(3):
        v = phi[k] * phi + np.cross(phi, (eye - rot)[:, k])
        jac[k] = (skew(v) / angle2) @ rot
    return jac


def aa_jacobians(phis: np.ndarray) -> np.ndarray:
    """Vectorized aa_jacobian: (N, 3) rotation vectors -> (N, 3, 3, 3)."""
    phis = np.asarray(phis, dtype=float).reshape(-1, 3)
    n = phis.shape[0]
    rots = aa_to_matrices(phis)
    angle2 = np.einsum("ni,ni->n", phis, phis)
    out = np.empty((n, 3, 3, 3))
    small = angle2 < _TINY_ANGLE**2
    eye = np.eye(3)
    # v_k = phi_k * phi + phi x ((I - R) e_k), then dR/dphi_k = [v_k]x / |phi|^2 R
    imr = eye[None, :, :] - rots  # (n, 3, 3)
    for k in range(3):
        v = phis[:, k : k + 1] * phis + np.cross(phis, imr[:, :, k])
        vk = np.zeros((n, 3, 3))
        vk[:, 0, 1] = -v[:, 2]
        vk[:, 0, 2] = v[:, 1]
        vk[:, 1, 0] = v[:, 2]
        vk[:, 1, 2] = -v[:, 0]
        vk[:, 2, 0] = -v[:, 1]
        vk[:, 2, 1] = v[:, 0]
        denom = np.where(small, 1.0, angle2)
        out[:, k] = (vk / denom[:, None, None]) @ rots
        if small.any():
            out[small, k] = skew(eye[k])
    return out


def matrix_to_aa(rot: np.ndarray) -> np.ndarray:
    """Log map: rotation matrix -> axis-angle vector with angle in [0, pi].

    At exactly pi the axis sign is ambiguous; the lexicographically smaller
    of the two antipodal axes is returned so results are reproducible.
    """
    rot = np.asarray(rot, dtype=float)
    trace = np.clip((np.trace(rot) - 1.0) * 0.5, -1.0, 1.0)
    angle = float(np.arccos(trace))
    if angle < _TINY_ANGLE:
        # First-order: R ~ I + [phi]x
        return np.array([rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]) * 0.5
    if angle > np.pi - 1e-6:
        # Near pi, extract the axis from the symmetric part R + I = 2 u u^T + O(pi - angle).
        sym = 0.5 * (rot + np.eye(3))
        k = int(np.argmax(np.diag(sym)))
        axis = sym[:, k] / np.sqrt(max(sym[k, k], 1e-18))
        axis = axis / np.linalg.norm(axis)
        if tuple(-axis) < tuple(axis):
            axis = -axis
        return axis * angle
    axis = np.array(
        [rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]]
    ) / (2.0 * np.sin(angle))
    return axis * angle


def canonicalize_aa(phi: np.ndarray) -> np.ndarray:
    """Wrap an axis-angle vector so its magnitude lies in [0, pi]."""
    phi = np.asarray(phi, dtype=float).copy()
    angle = float(np.linalg.norm(phi))
    if angle <= np.pi + 1e-9:
        return phi
    wrapped = angle % (2.0 * np.pi)
    if wrapped > np.pi:
        wrapped -= 2.0 * np.pi  # negative: flips the axis below
    return phi * (wrapped / angle)


def mirror_aa(phi: np.ndarray) -> np.ndarray:
    """Axis-angle of M R(phi) M for the reflection M = diag(-1, 1, 1)."""
    phi = np.asarray(phi, dtype=float)
    return np.array([phi[0], -phi[1], -phi[2]])


def rotation_between(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimal rotation matrix taking unit vector a onto unit vector b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = float(a @ b)
    axis = np.cross(a, b)
    s = float(np.linalg.norm(axis))
    if s < 1e-12:
        if c > 0.0:
            return np.eye(3)
        # Antiparallel: rotate by pi about any axis orthogonal to a.
        helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        axis = np.cross(a, helper)
        axis /= np.linalg.norm(axis)
        return aa_to_matrix(axis * np.pi)
    angle = np.arctan2(s, c)
    return aa_to_matrix(axis / s * angle)


class RigidTransform:
    """Rotation matrix plus translation; x -> R @ x + t."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation: np.ndarray, translation: np.ndarray):
        self.rotation = np.asarray(rotation, dtype=float).reshape(3, 3)
        self.translation = np.asarray(translation, dtype=float).reshape(3)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_aa(cls, rotvec: np.ndarray, translation: np.ndarray) -> "RigidTransform":
        return cls(aa_to_matrix(rotvec), translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        return points @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other: (self.compose(other)).apply(x) == self.apply(other.apply(x))."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def rotvec(self) -> np.ndarray:
        return matrix_to_aa(self.rotation)

    def mirrored(self) -> "RigidTransform":
        """Conjugation by the x-reflection: M T M."""
        m = np.diag([-1.0, 1.0, 1.0])
        return RigidTransform(m @ self.rotation @ m, m @ self.translation)

    def almost_equal(self, other: "RigidTransform", tol: float = 1e-9) -> bool:
        return (
            np.max(np.abs(self.rotation - other.rotation)) <= tol
            and np.max(np.abs(self.translation - other.translation)) <= tol
        )


def interpolate_rigid(t0: RigidTransform, t1: RigidTransform, t: float) -> RigidTransform:
    """Geodesic interpolation: linear translation, constant angular velocity.

    t=0 and t=1 return the endpoints exactly. For a 180 degree relative
    rotation the axis follows the matrix_to_aa tie rule.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter {t} outside [0, 1]")
    if t == 0.0:
        return RigidTransform(t0.rotation.copy(), t0.translation.copy())
    if t == 1.0:
        return RigidTransform(t1.rotation.copy(), t1.translation.copy())
    delta = matrix_to_aa(t0.rotation.T @ t1.rotation)
    rot = t0.rotation @ aa_to_matrix(delta * t)
    trans = (1.0 - t) * t0.translation + t * t1.translation
    return RigidTransform(rot, trans)
