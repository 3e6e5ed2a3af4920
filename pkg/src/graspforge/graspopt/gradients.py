"""Analytic gradient of the frozen-correspondence loss over (tau, phi, theta)."""

from __future__ import annotations

import numpy as np

from ..handmodel.asset import HandAsset
from ..handmodel.kinematics import NUM_PARAMS, PoseJacobian
from ..handmodel.pose import HandPose
from .config import OptimizerConfig
from .losses import FrozenCorrespondences, evaluate_frozen


def frozen_loss_value(
    asset: HandAsset,
    params: np.ndarray,
    frozen: FrozenCorrespondences,
    config: OptimizerConfig,
):
    """Frozen loss as a pure function of the 21 parameters.

    This is the function the analytic gradient differentiates; the test
    suite applies central finite differences to it.
    """
    pose = HandPose.from_params(params)
    jac = PoseJacobian(asset, pose)
    vertices = jac.vertices(np.arange(asset.num_vertices))
    wrist = jac.wrist_position()
    return evaluate_frozen(vertices, wrist, asset.fingertip_vertices, frozen, config)


def frozen_loss_gradient(
    asset: HandAsset,
    jac: PoseJacobian,
    hand_vertices: np.ndarray,
    wrist: np.ndarray,
    frozen: FrozenCorrespondences,
    config: OptimizerConfig,
) -> np.ndarray:
    """Gradient of the total frozen loss at the configuration of `jac`.

    Per-vertex cotangents are accumulated for every loss term, then pulled
    back through the skinning Jacobian of the active vertex subset only.
    """
    cot = np.zeros_like(hand_vertices)
    tips = asset.fingertip_vertices

    if len(frozen.object_points_inside):
        # d/dh ||o - h||^2 = 2 (h - o); the paired hand vertex may repeat.
        diff = hand_vertices[frozen.nearest_hand_vertex] - frozen.object_points_inside
        np.add.at(cot, frozen.nearest_hand_vertex, 2.0 * config.alpha * diff)
    if len(frozen.hand_inside_ids):
        diff = hand_vertices[frozen.hand_inside_ids] - frozen.nearest_object_point
        cot[frozen.hand_inside_ids] += 2.0 * config.alpha * diff

    cdiff = hand_vertices[frozen.contact_ids] - frozen.contact_targets
    cot[frozen.contact_ids] += 2.0 * config.beta * cdiff

    k = frozen.coefficient
    tip_pos = hand_vertices[tips]
    tdiff = tip_pos[0] - tip_pos[1:]
    cot[tips[0]] += 2.0 * config.gamma * k * tdiff.sum(axis=0)
    cot[tips[1:]] -= 2.0 * config.gamma * k * tdiff

    active = np.unique(
        np.concatenate(
            [frozen.nearest_hand_vertex, frozen.hand_inside_ids, frozen.contact_ids, tips]
        )
    )
    grad = np.zeros(NUM_PARAMS)
    if len(active):
        vertex_jac = jac.vertex_jacobian(active)  # (n, 3, 21)
        grad += np.einsum("nxp,nx->p", vertex_jac, cot[active])

    # Control term: L = 1 - (u . g) / |u| with u = center - wrist.
    u = frozen.object_center - wrist
    norm = np.linalg.norm(u)
    g = frozen.v_grasp
    dl_dwrist = g / norm - (u @ g) * u / norm**3
    grad += config.delta * (jac.wrist_jacobian().T @ dl_dwrist)
    return grad
