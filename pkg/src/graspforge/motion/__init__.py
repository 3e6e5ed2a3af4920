"""Kinematic handover sequence synthesis and serialization."""

from ..rotations import RigidTransform, interpolate_rigid
from .io import (
    load_sequence_binary,
    load_sequence_jsonl,
    save_sequence_binary,
    save_sequence_jsonl,
)
from .sequence import (
    Frame,
    HandoverSequence,
    TargetPose,
    TimingConfig,
    mirror_sequence,
    sdf_joint_features,
    synthesize_handover,
)

__all__ = [
    "Frame",
    "HandoverSequence",
    "TargetPose",
    "TimingConfig",
    "RigidTransform",
    "interpolate_rigid",
    "load_sequence_binary",
    "load_sequence_jsonl",
    "mirror_sequence",
    "save_sequence_binary",
    "save_sequence_jsonl",
    "sdf_joint_features",
    "synthesize_handover",
]
