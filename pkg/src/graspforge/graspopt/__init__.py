"""Two-stage controllable grasp optimizer."""

from .adam import Adam
from .config import OptimizerConfig
from .gradients import frozen_loss_gradient, frozen_loss_value
from .losses import (
    FrozenCorrespondences,
    LossBreakdown,
    control_loss,
    evaluate_frozen,
    freeze_correspondences,
    grasp_losses,
)
from .optimize import (
    GraspKeyframes,
    GraspRequest,
    QualityReport,
    compute_quality,
    doc_to_keyframes,
    keyframes_to_doc,
    load_keyframes,
    make_grasp_request,
    optimize_grasp,
    save_keyframes,
)
from .pregrasp import PregraspInfo, compute_global_pregrasp, optimize_finger_pregrasp

__all__ = [
    "Adam",
    "OptimizerConfig",
    "LossBreakdown",
    "FrozenCorrespondences",
    "GraspRequest",
    "GraspKeyframes",
    "QualityReport",
    "PregraspInfo",
    "control_loss",
    "compute_global_pregrasp",
    "compute_quality",
    "doc_to_keyframes",
    "evaluate_frozen",
    "freeze_correspondences",
    "frozen_loss_gradient",
    "frozen_loss_value",
    "grasp_losses",
    "keyframes_to_doc",
    "load_keyframes",
    "make_grasp_request",
    "optimize_finger_pregrasp",
    "optimize_grasp",
    "save_keyframes",
]
