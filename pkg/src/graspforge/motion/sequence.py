"""Kinematic handover synthesis: approach, close, transport.

The sequence is sampled from a continuous pose trajectory f(t), so frame
content depends only on timestamps, never on the frame rate. Each phase's
motion completes an `endpoint_hold` before the phase ends and holds there;
with the default hold of one default-rate frame this makes the last frame
of a phase exactly equal to the first frame of the next one while keeping
timestamps strictly increasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InvalidTiming
from ..geometry.mesh import TriangleMesh
from ..geometry.queries import ProximityIndex
from ..handmodel.asset import HandAsset
from ..handmodel.kinematics import joint_positions, skin_vertices
from ..handmodel.pose import HandPose
from ..rotations import RigidTransform, interpolate_rigid
from ..graspopt.optimize import GraspKeyframes

DEFAULT_FRAME_RATE = 30.0


@dataclass(frozen=True)
class TimingConfig:
    """Phase durations (seconds) and sampling rate for a handover."""

    approach: float = 1.0
    close: float = 0.5
    transport: float = 1.5
    frame_rate: float = DEFAULT_FRAME_RATE
    endpoint_hold: float = 1.0 / DEFAULT_FRAME_RATE

    def validate(self) -> None:
        if min(self.approach, self.close, self.transport) <= 0.0:
            raise InvalidTiming("phase durations must be positive")
        if self.frame_rate <= 0.0:
            raise InvalidTiming("frame rate must be positive")
        if self.endpoint_hold < 0.0 or self.endpoint_hold >= min(
            self.approach, self.close, self.transport
        ):
            raise InvalidTiming("endpoint hold must be shorter than every phase")

    def frame_counts(self) -> tuple[int, int, int]:
        return (
            int(round(self.approach * self.frame_rate)),
            int(round(self.close * self.frame_rate)),
            int(round(self.transport * self.frame_rate)),
        )


@dataclass(frozen=True)
class TargetPose:
    """Rigid object pose at the handover location."""

    transform: RigidTransform

    def mirrored(self) -> "TargetPose":
        return TargetPose(self.transform.mirrored())


@dataclass(frozen=True)
class Frame:
    timestamp: float
    hand_pose: HandPose
    object_pose: RigidTransform
    sdf_features: np.ndarray  # per-joint signed distances, object frame, meters


@dataclass(frozen=True)
class HandoverSequence:
    frames: tuple
    frame_rate: float
    phases: dict  # phase name -> (start index, frame count)
    chirality: str
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.frames)

    def hand_pose_array(self) -> np.ndarray:
        return np.stack([f.hand_pose.to_params() for f in self.frames])

    def feature_array(self) -> np.ndarray:
        return np.stack([f.sdf_features for f in self.frames])


def sdf_joint_features(
    asset: HandAsset,
    hand_pose: HandPose,
    object_pose: RigidTransform,
    object_index: ProximityIndex,
) -> np.ndarray:
    """Signed distance of every joint plus the five fingertips.

    Joints are mapped into the object's local frame before querying, so the
    features follow the object as it moves.
    """
    state = skin_vertices(asset, hand_pose)
    points = np.concatenate([state.joints, state.fingertips])
    local = object_pose.inverse().apply(points)
    return object_index.signed_distance(local)


def _progress(elapsed: float, duration: float, hold: float) -> float:
    s = elapsed / (duration - hold)
    # Snap to the endpoint so held frames are bitwise identical.
    return 1.0 if s >= 1.0 - 1e-12 else max(0.0, s)


def _pose_at(
    t: float,
    timing: TimingConfig,
    pre: HandPose,
    grasp: HandPose,
    object_start: RigidTransform,
    target: RigidTransform,
):
    """Continuous trajectory: hand pose and object pose at time t."""
    t_a = timing.approach
    t_c = timing.close
    t_t = timing.transport
    hold = timing.endpoint_hold
    pre_global = RigidTransform.from_aa(pre.phi, pre.tau)
    grasp_global = RigidTransform.from_aa(grasp.phi, grasp.tau)
    if t < t_a:
        s = _progress(t, t_a, hold)
        if s == 1.0:
            hand = HandPose(tau=grasp.tau, phi=grasp.phi, theta=pre.theta)
        else:
            wrist = interpolate_rigid(pre_global, grasp_global, s)
            hand = HandPose(tau=wrist.translation, phi=wrist.rotvec(), theta=pre.theta)
        return hand, object_start
    if t < t_a + t_c:
        s = _progress(t - t_a, t_c, hold)
        theta = (1.0 - s) * pre.theta + s * grasp.theta
        hand = HandPose(tau=grasp.tau, phi=grasp.phi, theta=theta)
        return hand, object_start
    s = _progress(t - t_a - t_c, t_t, hold)
    if s == 0.0:
        return HandPose(tau=grasp.tau, phi=grasp.phi, theta=grasp.theta), object_start
    obj = interpolate_rigid(object_start, target, s)
    # The hand co-moves rigidly with the object during transport.
    delta = obj.compose(object_start.inverse())
    hand_global = delta.compose(RigidTransform.from_aa(grasp.phi, grasp.tau))
    hand = HandPose(tau=hand_global.translation, phi=hand_global.rotvec(), theta=grasp.theta)
    return hand, obj


def synthesize_handover(
    keyframes: GraspKeyframes,
    asset: HandAsset,
    object_index: ProximityIndex,
    object_pose: RigidTransform,
    target: TargetPose,
    timing: TimingConfig = TimingConfig(),
    chirality: str | None = None,
    provenance: dict | None = None,
) -> HandoverSequence:
    """Approach (wrist), close (fingers), transport (rigid co-movement).

    The keyframe poses are expressed in the object's local frame times
    `object_pose`; the object mesh behind `object_index` is expected in that
    local frame.
    """
    timing.validate()
    n_a, n_c, n_t = timing.frame_counts()
    if min(n_a, n_c, n_t) < 1:
        raise InvalidTiming("every phase needs at least one frame")
    target_world = target.transform
    frames = []
    dt = 1.0 / timing.frame_rate
    total = n_a + n_c + n_t
    for i in range(total):
        t = i * dt
        hand, obj = _pose_at(t, timing, keyframes.pre, keyframes.grasp, object_pose, target_world)
        feats = sdf_joint_features(asset, hand, obj, object_index)
        frames.append(
            Frame(timestamp=t, hand_pose=hand, object_pose=obj, sdf_features=feats)
        )
    phases = {
        "approach": (0, n_a),
        "close": (n_a, n_c),
        "transport": (n_a + n_c, n_t),
    }
    prov = dict(provenance or {})
    prov.setdefault("target_translation", target.transform.translation.tolist())
    prov.setdefault("target_rotvec", target.transform.rotvec().tolist())
    return HandoverSequence(
        frames=tuple(frames),
        frame_rate=timing.frame_rate,
        phases=phases,
        chirality=chirality or asset.chirality,
        provenance=prov,
    )


def mirror_sequence(
    seq: HandoverSequence,
    asset: HandAsset,
    object_index: ProximityIndex,
) -> HandoverSequence:
    """Reflect a sequence across x=0 and recompute its SDF features.

    `asset` and `object_index` are the originals; the features are evaluated
    with the mirrored asset against the mirrored object geometry, which by
    isometry reproduces the original values.
    """
    mirrored_asset = asset.mirrored()
    mirrored_index = ProximityIndex(
        object_index.mesh.mirrored(), _mirror_samples(object_index)
    )
    frames = []
    for f in seq.frames:
        hand = f.hand_pose.mirrored()
        obj = f.object_pose.mirrored()
        feats = sdf_joint_features(mirrored_asset, hand, obj, mirrored_index)
        frames.append(
            Frame(timestamp=f.timestamp, hand_pose=hand, object_pose=obj, sdf_features=feats)
        )
    return HandoverSequence(
        frames=tuple(frames),
        frame_rate=seq.frame_rate,
        phases=dict(seq.phases),
        chirality="left" if seq.chirality == "right" else "right",
        provenance=dict(seq.provenance, mirrored=not seq.provenance.get("mirrored", False)),
    )


def _mirror_samples(index: ProximityIndex):
    samples = index.samples
    if samples is None:
        return None
    pts = samples.points.copy()
    pts[:, 0] = -pts[:, 0]
    return replace(samples, points=pts)
