"""Seeded grasp-direction and target-pose sampling."""

from __future__ import annotations

import hashlib

import numpy as np

from ..geometry.plane import plane_basis
from ..motion.sequence import TargetPose
from ..rotations import RigidTransform


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels, identical across platforms."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def sample_grasp_directions(
    bearing: np.ndarray, n: int, half_angle_deg: float, seed: int
) -> np.ndarray:
    """Unit directions drawn uniformly (by solid angle) within a cone.

    The cone opens around the robot bearing so sampled grasps point toward
    the robot side.
    """
    if n < 0:
        raise ValueError("direction count must be non-negative")
    if not 0.0 < half_angle_deg <= 90.0:
        raise ValueError("half angle must lie in (0, 90] degrees")
    bearing = np.asarray(bearing, dtype=float)
    bearing = bearing / np.linalg.norm(bearing)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = rng.random((n, 2))
    cos_max = np.cos(np.radians(half_angle_deg))
    cos_t = 1.0 - u[:, 0] * (1.0 - cos_max)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t**2))
    phi = 2.0 * np.pi * u[:, 1]
    e1, e2 = plane_basis(bearing)
    dirs = (
        cos_t[:, None] * bearing
        + (sin_t * np.cos(phi))[:, None] * e1
        + (sin_t * np.sin(phi))[:, None] * e2
    )
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def sample_target_pose(
    initial: RigidTransform, ranges: dict, seed: int
) -> TargetPose:
    """Uniform position offset from the initial pose; orientation preserved."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    u = rng.random(3)
    offset = np.array(
        [
            ranges["x"][0] + u[0] * (ranges["x"][1] - ranges["x"][0]),
            ranges["y"][0] + u[1] * (ranges["y"][1] - ranges["y"][0]),
            ranges["z"][0] + u[2] * (ranges["z"][1] - ranges["z"][0]),
        ]
    )
    return TargetPose(
        RigidTransform(initial.rotation.copy(), initial.translation + offset)
    )
