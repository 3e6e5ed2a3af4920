"""Forward kinematics, linear blend skinning, landmarks, and their Jacobians.

The kinematic chain composes per-joint axis-angle rotations about the rest
joint positions; the global wrist transform (rotation(phi), tau) is applied
afterwards, so the wrist joint's skinning transform is exactly that rigid
transform. All derivatives are analytic and validated against central
finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rotations import RigidTransform, aa_jacobian, aa_jacobians, aa_to_matrices, aa_to_matrix
from .asset import NUM_ANGLES, NUM_FINGER_JOINTS, NUM_JOINTS, NUM_POSE_COEFFS, HandAsset
from .pose import HandPose

# Parameter vector layout: [tau(0:3), phi(3:6), theta(6:21)].
NUM_PARAMS = 21


def pose_to_joint_angles(asset: HandAsset, theta: np.ndarray) -> np.ndarray:
    """Map pose coefficients to the 45 per-joint rotation-vector components."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    return asset.pose_mean + asset.pose_basis @ theta


def _zero_global_chain(asset: HandAsset, angles: np.ndarray):
    """Global joint rotations/positions with the wrist transform left out.

    Returns (rg, tg): rg (16, 3, 3) rotations, tg (16, 3) joint origins.
    """
    local_rots = np.empty((NUM_JOINTS, 3, 3))
    local_rots[0] = np.eye(3)
    local_rots[1:] = aa_to_matrices(angles.reshape(NUM_FINGER_JOINTS, 3))
    rg = np.empty((NUM_JOINTS, 3, 3))
    tg = np.empty((NUM_JOINTS, 3))
    rg[0] = np.eye(3)
    tg[0] = asset.rest_joints[0]
    for j in range(1, NUM_JOINTS):
        p = asset.parents[j]
        offset = asset.rest_joints[j] - asset.rest_joints[p]
        rg[j] = rg[p] @ local_rots[j]
        tg[j] = rg[p] @ offset + tg[p]
    return rg, tg


def forward_kinematics(asset: HandAsset, pose: HandPose) -> list[RigidTransform]:
    """Per-joint skinning transforms (template space -> posed space).

    The wrist entry equals (rotation(phi), tau) exactly.
    """
    angles = pose_to_joint_angles(asset, pose.theta)
    rg, tg = _zero_global_chain(asset, angles)
    glob_r = aa_to_matrix(pose.phi)
    out = []
    for j in range(NUM_JOINTS):
        rot = glob_r @ rg[j]
        trans = glob_r @ (tg[j] - rg[j] @ asset.rest_joints[j]) + pose.tau
        out.append(RigidTransform(rot, trans))
    return out


def joint_positions(asset: HandAsset, pose: HandPose) -> np.ndarray:
    angles = pose_to_joint_angles(asset, pose.theta)
    _, tg = _zero_global_chain(asset, angles)
    return tg @ aa_to_matrix(pose.phi).T + pose.tau


@dataclass(frozen=True)
class HandState:
    """Derived quantities of a posed hand.

    grasp_axis points from the thumb tip to the middle fingertip; heading
    points from the wrist joint to the midpoint of that segment.
    """

    vertices: np.ndarray
    joints: np.ndarray
    fingertips: np.ndarray
    grasp_axis: np.ndarray
    heading: np.ndarray

    def mirrored(self) -> "HandState":
        m = np.array([-1.0, 1.0, 1.0])
        return HandState(
            vertices=self.vertices * m,
            joints=self.joints * m,
            fingertips=self.fingertips * m,
            grasp_axis=self.grasp_axis * m,
            heading=self.heading * m,
        )


def _landmarks(vertices: np.ndarray, joints: np.ndarray, asset: HandAsset):
    fingertips = vertices[asset.fingertip_vertices]
    thumb, middle = fingertips[0], fingertips[2]
    axis = middle - thumb
    axis_norm = np.linalg.norm(axis)
    if axis_norm < 1e-12:
        raise ValueError("degenerate landmarks: thumb and middle tips coincide")
    heading = 0.5 * (thumb + middle) - joints[0]
    heading_norm = np.linalg.norm(heading)
    if heading_norm < 1e-12:
        raise ValueError("degenerate landmarks: grasp axis midpoint at the wrist")
    return fingertips, axis / axis_norm, heading / heading_norm


def skin_vertices(asset: HandAsset, pose: HandPose) -> HandState:
    """Linear blend skinning of the template plus landmark extraction."""
    angles = pose_to_joint_angles(asset, pose.theta)
    rg, tg = _zero_global_chain(asset, angles)
    v0 = np.zeros_like(asset.template)
    for j in range(NUM_JOINTS):
        w = asset.weights[:, j]
        if not w.any():
            continue
        contrib = (asset.template - asset.rest_joints[j]) @ rg[j].T + tg[j]
        v0 += w[:, None] * contrib
    glob_r = aa_to_matrix(pose.phi)
    vertices = v0 @ glob_r.T + pose.tau
    joints = tg @ glob_r.T + pose.tau
    fingertips, axis, heading = _landmarks(vertices, joints, asset)
    return HandState(
        vertices=vertices,
        joints=joints,
        fingertips=fingertips,
        grasp_axis=axis,
        heading=heading,
    )


def thumb_tip_y(asset: HandAsset, theta: np.ndarray) -> float:
    """y-coordinate of the thumb fingertip with zero global transform."""
    state = skin_vertices(asset, HandPose.identity(theta=np.asarray(theta, dtype=float)))
    return float(state.fingertips[0, 1])


class PoseJacobian:
    """Analytic derivatives of skinned vertices w.r.t. the 21 parameters.

    Built once per pose; vertex_jacobian() returns (n, 3, 21) blocks for a
    vertex subset, wrist_jacobian() the (3, 21) derivative of the wrist
    joint position.
    """

    def __init__(self, asset: HandAsset, pose: HandPose):
        self.asset = asset
        self.pose = pose
        angles = pose_to_joint_angles(asset, pose.theta)
        rg, tg = _zero_global_chain(asset, angles)
        self._rg = rg
        self._tg = tg
        self._glob_r = aa_to_matrix(pose.phi)
        self._glob_jac = aa_jacobian(pose.phi)  # (3, 3, 3): dR/dphi_k

        local_rots = np.empty((NUM_JOINTS, 3, 3))
        local_rots[0] = np.eye(3)
        local_rots[1:] = aa_to_matrices(angles.reshape(NUM_FINGER_JOINTS, 3))
        local_jacs = aa_jacobians(angles.reshape(NUM_FINGER_JOINTS, 3))
        # Chain-rule propagation of d/d(angle component) down the tree.
        drg = np.zeros((NUM_JOINTS, NUM_ANGLES, 3, 3))
        dtg = np.zeros((NUM_JOINTS, NUM_ANGLES, 3))
        for j in range(1, NUM_JOINTS):
            p = self.asset.parents[j]
            offset = asset.rest_joints[j] - asset.rest_joints[p]
            drg[j] = drg[p] @ local_rots[j]
            drg[j, 3 * (j - 1) : 3 * j] += rg[p] @ local_jacs[j - 1]
            dtg[j] = np.einsum("axy,y->ax", drg[p], offset) + dtg[p]
        self._drg = drg
        self._dtg = dtg
        # Pre-contract the 45 angle slots down to the pose coefficients.
        self._drg_theta = np.einsum("jaxy,ab->jbxy", drg, asset.pose_basis)
        self._dtg_theta = np.einsum("jax,ab->jbx", dtg, asset.pose_basis)

    def skinned_zero_global(self, vertex_ids: np.ndarray) -> np.ndarray:
        """Skinned positions before the global transform, for a subset."""
        template = self.asset.template[vertex_ids]
        weights = self.asset.weights[vertex_ids]
        v0 = np.zeros_like(template)
        for j in range(NUM_JOINTS):
            w = weights[:, j]
            if not w.any():
                continue
            contrib = (template - self.asset.rest_joints[j]) @ self._rg[j].T + self._tg[j]
            v0 += w[:, None] * contrib
        return v0

    def vertex_jacobian(self, vertex_ids) -> np.ndarray:
        vertex_ids = np.asarray(vertex_ids, dtype=np.int64).reshape(-1)
        template = self.asset.template[vertex_ids]
        weights = self.asset.weights[vertex_ids]
        # Accumulate per influencing joint; skinning weights are sparse in
        # practice, so only the vertices actually bound to a joint pay for it.
        dv0_dtheta = np.zeros((len(vertex_ids), NUM_POSE_COEFFS, 3))
        v0 = np.zeros_like(template)
        for j in range(NUM_JOINTS):
            w = weights[:, j]
            bound = np.nonzero(w)[0]
            if len(bound) == 0:
                continue
            diff = template[bound] - self.asset.rest_joints[j]
            v0[bound] += w[bound, None] * (diff @ self._rg[j].T + self._tg[j])
            contrib = np.einsum("bxy,ny->nbx", self._drg_theta[j], diff)
            contrib += self._dtg_theta[j]
            dv0_dtheta[bound] += w[bound, None, None] * contrib
        jac = np.zeros((len(vertex_ids), 3, NUM_PARAMS))
        jac[:, :, 0:3] = np.eye(3)
        # d/dphi_k of glob_r @ v0
        jac[:, :, 3:6] = np.einsum("kxy,ny->nxk", self._glob_jac, v0)
        jac[:, :, 6:] = np.einsum("xy,nby->nxb", self._glob_r, dv0_dtheta)
        return jac

    def wrist_jacobian(self) -> np.ndarray:
        """(3, 21) derivative of the wrist joint position; theta has no effect."""
        jac = np.zeros((3, NUM_PARAMS))
        jac[:, 0:3] = np.eye(3)
        jac[:, 3:6] = np.einsum("kxy,y->xk", self._glob_jac, self._tg[0])
        return jac

    def wrist_position(self) -> np.ndarray:
        return self._glob_r @ self._tg[0] + self.pose.tau

    def joint_positions(self) -> np.ndarray:
        return self._tg @ self._glob_r.T + self.pose.tau

    def vertices(self, vertex_ids) -> np.ndarray:
        """Posed positions for a subset, consistent with skin_vertices."""
        vertex_ids = np.asarray(vertex_ids, dtype=np.int64).reshape(-1)
        v0 = self.skinned_zero_global(vertex_ids)
        return v0 @ self._glob_r.T + self.pose.tau
