"""Hand pose parameterization: wrist transform plus pose-space coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rotations import canonicalize_aa, mirror_aa
from .asset import NUM_POSE_COEFFS


@dataclass(frozen=True)
class HandPose:
    """Optimization variables: tau (wrist translation, m), phi (wrist
    orientation, axis-angle, canonical magnitude <= pi), theta (pose
    coefficients)."""

    tau: np.ndarray
    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float).reshape(3))
        phi = canonicalize_aa(np.asarray(self.phi, dtype=float).reshape(3))
        object.__setattr__(self, "phi", phi)
        object.__setattr__(
            self, "theta", np.asarray(self.theta, dtype=float).reshape(NUM_POSE_COEFFS)
        )
        for arr in (self.tau, self.phi, self.theta):
            arr.setflags(write=False)

    @classmethod
    def identity(cls, theta: np.ndarray | None = None) -> "HandPose":
        return cls(
            tau=np.zeros(3),
            phi=np.zeros(3),
            theta=np.zeros(NUM_POSE_COEFFS) if theta is None else theta,
        )

    @classmethod
    def from_params(cls, params: np.ndarray) -> "HandPose":
        params = np.asarray(params, dtype=float).reshape(3 + 3 + NUM_POSE_COEFFS)
        return cls(tau=params[:3], phi=params[3:6], theta=params[6:])

    def to_params(self) -> np.ndarray:
        return np.concatenate([self.tau, self.phi, self.theta])

    def mirrored(self) -> "HandPose":
        """Reflection across x=0 (exact involution)."""
        tau = self.tau.copy()
        tau[0] = -tau[0]
        return HandPose(tau=tau, phi=mirror_aa(self.phi), theta=self.theta.copy())

    def almost_equal(self, other: "HandPose", tol: float = 0.0) -> bool:
        return (
            np.max(np.abs(self.tau - other.tau)) <= tol
            and np.max(np.abs(self.phi - other.phi)) <= tol
            and np.max(np.abs(self.theta - other.theta)) <= tol
        )
