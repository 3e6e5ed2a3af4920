"""Parametric skinned hand: asset, pose space, kinematics, mirroring."""

from .asset import (
    NUM_ANGLES,
    NUM_JOINTS,
    NUM_POSE_COEFFS,
    HandAsset,
    convert_mano_model,
    load_hand_asset,
    save_hand_asset,
)
from .kinematics import (
    NUM_PARAMS,
    HandState,
    PoseJacobian,
    forward_kinematics,
    joint_positions,
    pose_to_joint_angles,
    skin_vertices,
    thumb_tip_y,
)
from .pose import HandPose
from .testasset import build_test_asset

__all__ = [
    "HandAsset",
    "HandPose",
    "HandState",
    "PoseJacobian",
    "NUM_JOINTS",
    "NUM_ANGLES",
    "NUM_POSE_COEFFS",
    "NUM_PARAMS",
    "build_test_asset",
    "convert_mano_model",
    "forward_kinematics",
    "joint_positions",
    "load_hand_asset",
    "pose_to_joint_angles",
    "save_hand_asset",
    "skin_vertices",
    "thumb_tip_y",
]
