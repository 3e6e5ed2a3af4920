"""Grasp refinement loop and keyframe output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import NonFinite, ParseError
from ..geometry.mesh import TriangleMesh
from ..geometry.queries import ProximityIndex
from ..geometry.sampling import SurfaceSamples, sample_surface
from ..handmodel.asset import HandAsset
from ..handmodel.kinematics import PoseJacobian, skin_vertices
from ..handmodel.pose import HandPose
from .adam import Adam
from .config import OptimizerConfig
from .gradients import frozen_loss_gradient
from .losses import LossBreakdown, evaluate_frozen, freeze_correspondences
from .pregrasp import PregraspInfo, compute_global_pregrasp, optimize_finger_pregrasp

KEYFRAMES_FORMAT = "graspkeyframes-v1"


@dataclass(frozen=True)
class GraspRequest:
    """Everything one grasp optimization needs, immutable and shareable."""

    mesh: TriangleMesh
    samples: SurfaceSamples
    index: ProximityIndex
    asset: HandAsset
    v_grasp: np.ndarray
    config: OptimizerConfig = OptimizerConfig()
    theta_pre: np.ndarray | None = None  # reuse a precomputed finger pre-grasp
    provenance: dict = field(default_factory=dict)

    @property
    def object_center(self) -> np.ndarray:
        # The object center is the centroid of the surface samples, matching
        # the sampled-point pipeline everywhere else.
        return self.samples.centroid


def make_grasp_request(
    mesh: TriangleMesh,
    asset: HandAsset,
    direction,
    config: OptimizerConfig = OptimizerConfig(),
    n_samples: int = 3000,
    seed: int = 0,
    theta_pre: np.ndarray | None = None,
    provenance: dict | None = None,
) -> GraspRequest:
    direction = np.asarray(direction, dtype=float).reshape(3)
    norm = np.linalg.norm(direction)
    if norm < 1e-12:
        raise ValueError("zero grasp direction")
    samples = sample_surface(mesh, n_samples, seed)
    index = ProximityIndex(mesh, samples)
    prov = {"samples_seed": seed, "num_samples": n_samples}
    if provenance:
        prov.update(provenance)
    return GraspRequest(
        mesh=mesh,
        samples=samples,
        index=index,
        asset=asset,
        v_grasp=direction / norm,
        config=config,
        theta_pre=theta_pre,
        provenance=prov,
    )


@dataclass(frozen=True)
class QualityReport:
    """Geometric grasp quality, recomputable from the keyframes and object."""

    max_penetration: float  # meters
    contact_count: int  # contact-candidate vertices within the threshold
    direction_deviation_deg: float

    def to_dict(self) -> dict:
        return {
            "max_penetration_m": self.max_penetration,
            "contact_count": self.contact_count,
            "direction_deviation_deg": self.direction_deviation_deg,
        }


@dataclass(frozen=True)
class GraspKeyframes:
    """Paired pre-grasp and grasp reference poses plus diagnostics."""

    pre: HandPose
    grasp: HandPose
    losses: LossBreakdown
    quality: QualityReport
    trace: np.ndarray
    pregrasp_info: PregraspInfo
    config: OptimizerConfig
    provenance: dict

    def mirrored(self) -> "GraspKeyframes":
        return GraspKeyframes(
            pre=self.pre.mirrored(),
            grasp=self.grasp.mirrored(),
            losses=self.losses,
            quality=self.quality,
            trace=self.trace,
            pregrasp_info=self.pregrasp_info,
            config=self.config,
            provenance=dict(self.provenance, mirrored=True),
        )


def compute_quality(
    asset: HandAsset,
    pose: HandPose,
    index: ProximityIndex,
    v_grasp: np.ndarray,
    object_center: np.ndarray,
    config: OptimizerConfig,
) -> QualityReport:
    state = skin_vertices(asset, pose)
    sdf = index.signed_distance(state.vertices)
    max_pen = float(max(0.0, -sdf.min()))
    contact_ids = (
        np.arange(asset.num_vertices) if config.contact_all_vertices else asset.contact_vertices
    )
    contact_d = index.surface_distances(state.vertices[contact_ids])
    contact_count = int((contact_d <= config.contact_threshold).sum())
    wrist = state.joints[0]
    u = object_center - wrist
    cosang = float(np.clip(u @ v_grasp / np.linalg.norm(u), -1.0, 1.0))
    deviation = float(np.degrees(np.arccos(cosang)))
    return QualityReport(
        max_penetration=max_pen,
        contact_count=contact_count,
        direction_deviation_deg=deviation,
    )


def optimize_grasp(request: GraspRequest) -> GraspKeyframes:
    """Two-stage grasp optimization: pre-grasp construction then refinement.

    Runs the configured number of Adam steps on the 21 pose parameters with
    correspondences re-frozen every step. Pure function of the request;
    repeat runs are bit-identical.
    """
    asset = request.asset
    config = request.config
    theta_pre = (
        request.theta_pre
        if request.theta_pre is not None
        else optimize_finger_pregrasp(asset, config)
    )
    pre_pose, info = compute_global_pregrasp(
        asset, request.samples, request.index, request.v_grasp, theta_pre, config
    )
    center = request.object_center
    params = pre_pose.to_params()
    adam = Adam(
        len(params), beta1=config.adam_beta1, beta2=config.adam_beta2, eps=config.adam_eps
    )
    trace = np.empty(config.refinement_steps)
    all_ids = np.arange(asset.num_vertices)
    for step in range(config.refinement_steps):
        jac = PoseJacobian(asset, HandPose.from_params(params))
        vertices = jac.vertices(all_ids)
        wrist = jac.wrist_position()
        frozen = freeze_correspondences(
            asset, vertices, request.index, request.v_grasp, center, config, step
        )
        losses = evaluate_frozen(vertices, wrist, asset.fingertip_vertices, frozen, config)
        trace[step] = losses.total
        if not losses.finite():
            raise NonFinite(f"non-finite loss at step {step}", trace=trace[: step + 1])
        gradient = frozen_loss_gradient(asset, jac, vertices, wrist, frozen, config)
        if not np.isfinite(gradient).all():
            raise NonFinite(f"non-finite gradient at step {step}", trace=trace[: step + 1])
        params = adam.step(params, gradient, config.learning_rate_at(step))
    grasp_pose = HandPose.from_params(params)
    state = skin_vertices(asset, grasp_pose)
    final_losses, _ = _final_losses(asset, state, request, config)
    quality = compute_quality(asset, grasp_pose, request.index, request.v_grasp, center, config)
    provenance = dict(request.provenance)
    provenance.update(
        {
            "grasp_direction": request.v_grasp.tolist(),
            "object_center": center.tolist(),
            "clearance_m": info.clearance,
            "clearance_escalations": info.clearance_escalations,
            "axis_undefined": info.axis_undefined,
            "axis_rotation_tie": info.axis_rotation_tie,
        }
    )
    return GraspKeyframes(
        pre=pre_pose,
        grasp=grasp_pose,
        losses=final_losses,
        quality=quality,
        trace=trace,
        pregrasp_info=info,
        config=config,
        provenance=provenance,
    )


def _final_losses(asset, state, request, config):
    frozen = freeze_correspondences(
        asset,
        state.vertices,
        request.index,
        request.v_grasp,
        request.object_center,
        config,
        config.refinement_steps,
    )
    losses = evaluate_frozen(
        state.vertices, state.joints[0], asset.fingertip_vertices, frozen, config
    )
    return losses, frozen


# -- serialization -------------------------------------------------------------


def keyframes_to_doc(kf: GraspKeyframes) -> dict:
    return {
        "format": KEYFRAMES_FORMAT,
        "pre": kf.pre.to_params().tolist(),
        "grasp": kf.grasp.to_params().tolist(),
        "losses": kf.losses.to_dict(),
        "quality": kf.quality.to_dict(),
        "trace": kf.trace.tolist(),
        "pregrasp": {
            "clearance_m": kf.pregrasp_info.clearance,
            "clearance_escalations": kf.pregrasp_info.clearance_escalations,
            "standoff_distance_m": kf.pregrasp_info.standoff_distance,
            "axis_undefined": kf.pregrasp_info.axis_undefined,
            "axis_rotation_tie": kf.pregrasp_info.axis_rotation_tie,
            "axis_rotation_angle": kf.pregrasp_info.axis_rotation_angle,
        },
        "config": kf.config.to_dict(),
        "provenance": kf.provenance,
    }


def save_keyframes(kf: GraspKeyframes, path) -> None:
    Path(path).write_text(json.dumps(keyframes_to_doc(kf), sort_keys=True) + "\n")


def doc_to_keyframes(doc: dict) -> GraspKeyframes:
    if doc.get("format") != KEYFRAMES_FORMAT:
        raise ParseError(f"expected format {KEYFRAMES_FORMAT!r}, got {doc.get('format')!r}")
    losses = doc["losses"]
    quality = doc["quality"]
    pg = doc["pregrasp"]
    return GraspKeyframes(
        pre=HandPose.from_params(np.array(doc["pre"])),
        grasp=HandPose.from_params(np.array(doc["grasp"])),
        losses=LossBreakdown(
            dual_penetration=losses["dual_penetration"],
            contact=losses["contact"],
            fingertip=losses["fingertip"],
            control=losses["control"],
            total=losses["total"],
            inside_object_points=losses["inside_object_points"],
            inside_hand_vertices=losses["inside_hand_vertices"],
            wrist_vector=np.array(losses["wrist_vector"]),
        ),
        quality=QualityReport(
            max_penetration=quality["max_penetration_m"],
            contact_count=quality["contact_count"],
            direction_deviation_deg=quality["direction_deviation_deg"],
        ),
        trace=np.array(doc["trace"]),
        pregrasp_info=PregraspInfo(
            clearance=pg["clearance_m"],
            clearance_escalations=pg["clearance_escalations"],
            standoff_distance=pg["standoff_distance_m"],
            axis_undefined=pg["axis_undefined"],
            axis_rotation_tie=pg["axis_rotation_tie"],
            axis_rotation_angle=pg["axis_rotation_angle"],
        ),
        config=OptimizerConfig.from_dict(doc["config"]),
        provenance=doc.get("provenance", {}),
    )


def load_keyframes(path) -> GraspKeyframes:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read keyframes {path}: {exc}") from exc
    return doc_to_keyframes(doc)
