"""Gripper-like finger pre-grasp and 6D global pre-grasp construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSet, NoCollisionFreeStandoff
from ..geometry.plane import principal_axes_2d, project_to_plane
from ..geometry.queries import ProximityIndex
from ..geometry.sampling import SurfaceSamples, furthest_point_along
from ..handmodel.asset import HandAsset
from ..handmodel.kinematics import PoseJacobian, skin_vertices
from ..handmodel.pose import HandPose
from ..rotations import aa_to_matrix, matrix_to_aa, rotation_between
from .adam import Adam
from .config import OptimizerConfig

# Extra rotation angles this close to the 90 degree tie are skipped.
_AXIS_TIE_TOL = 1e-9


def optimize_finger_pregrasp(asset: HandAsset, config: OptimizerConfig) -> np.ndarray:
    """Open the hand into a two-jaw shape by driving the thumb tip off the
    palm plane.

    Starts from the flat coefficients with zero global transform and runs
    Adam on the thumb tip's y-coordinate. Deterministic.
    """
    theta = asset.theta_flat.copy()
    if config.pregrasp_iterations == 0:
        return theta
    adam = Adam(
        len(theta), beta1=config.adam_beta1, beta2=config.adam_beta2, eps=config.adam_eps
    )
    thumb_vertex = np.array([asset.fingertip_vertices[0]])
    for _ in range(config.pregrasp_iterations):
        jac = PoseJacobian(asset, HandPose.identity(theta=theta))
        vertex_jac = jac.vertex_jacobian(thumb_vertex)  # (1, 3, 21)
        grad_theta = vertex_jac[0, 1, 6:]
        theta = adam.step(theta, grad_theta, config.learning_rate)
    return theta


@dataclass(frozen=True)
class PregraspInfo:
    """How the global pre-grasp was constructed, echoed into outputs."""

    clearance: float
    clearance_escalations: int
    standoff_distance: float
    axis_undefined: bool
    axis_rotation_tie: bool
    axis_rotation_angle: float


def compute_global_pregrasp(
    asset: HandAsset,
    samples: SurfaceSamples,
    index: ProximityIndex,
    v_grasp: np.ndarray,
    theta_pre: np.ndarray,
    config: OptimizerConfig,
) -> tuple[HandPose, PregraspInfo]:
    """Wrist placement and orientation for the pre-grasp.

    The wrist sits behind the surface point furthest toward the wrist side
    (along -v_grasp) at a clearance offset, the hand's heading is rotated
    onto v_grasp, and a final twist about v_grasp aligns the grasp axis with
    the narrowest in-plane direction of the projected object. The clearance
    doubles (at most three times) until no hand vertex lies inside the
    object.
    """
    v_grasp = np.asarray(v_grasp, dtype=float)
    center = samples.centroid
    _, standoff, _ = furthest_point_along(samples, center, -v_grasp)

    state0 = skin_vertices(asset, HandPose.identity(theta=theta_pre))
    align = rotation_between(state0.heading, v_grasp)
    axis_world = align @ state0.grasp_axis

    axis_undefined = False
    tie = False
    twist_angle = 0.0
    projection = project_to_plane(samples.points, v_grasp)
    try:
        axes = principal_axes_2d(projection.coords)
        degenerate = axes.degenerate
        minor3 = projection.to_3d_direction(axes.minor) if not degenerate else None
    except DegenerateSet:
        degenerate = True
        minor3 = None
    if degenerate or minor3 is None:
        axis_undefined = True
        rot = align
    else:
        in_plane = axis_world - (axis_world @ v_grasp) * v_grasp
        nrm = np.linalg.norm(in_plane)
        if nrm < 1e-9:
            axis_undefined = True
            rot = align
        else:
            in_plane /= nrm
            # Signed angle about v_grasp from the current axis to +/- minor.
            ang = float(
                np.arctan2(np.cross(in_plane, minor3) @ v_grasp, in_plane @ minor3)
            )
            other = ang - np.pi if ang > 0 else ang + np.pi
            if abs(abs(ang) - abs(other)) <= _AXIS_TIE_TOL:
                tie = True
                twist_angle = 0.0
            else:
                twist_angle = ang if abs(ang) < abs(other) else other
            rot = aa_to_matrix(v_grasp * twist_angle) @ align

    clearance = config.standoff_clearance
    for escalation in range(4):
        wrist_target = center - v_grasp * (standoff + clearance)
        tau = wrist_target - rot @ asset.rest_joints[0]
        pose = HandPose(tau=tau, phi=matrix_to_aa(rot), theta=theta_pre)
        state = skin_vertices(asset, pose)
        if not index.inside(state.vertices).mask.any():
            info = PregraspInfo(
                clearance=clearance,
                clearance_escalations=escalation,
                standoff_distance=standoff,
                axis_undefined=axis_undefined,
                axis_rotation_tie=tie,
                axis_rotation_angle=twist_angle,
            )
            return pose, info
        clearance *= 2.0
    raise NoCollisionFreeStandoff(
        f"hand still collides after escalating clearance to {clearance / 2.0} m"
    )
