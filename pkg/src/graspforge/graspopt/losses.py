"""Grasp objective: dual penetration, contact, dynamic fingertip, control.

Each optimization step first freezes the discrete structure (which object
points lie inside the hand, which hand vertices lie inside the object, and
every nearest-neighbor pairing) at the current configuration. The loss and
its analytic gradient are then smooth functions of the hand parameters, and
central finite differences of the frozen loss validate the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..geometry.queries import ParityGrid, ProximityIndex, TIE_RTOL
from ..handmodel.asset import HandAsset
from .config import OptimizerConfig


@dataclass(frozen=True)
class LossBreakdown:
    """Loss terms before weighting plus bookkeeping counts.

    total is exactly alpha * dual_penetration + beta * contact +
    gamma * fingertip + delta * control. fingertip may be negative while
    the dynamic coefficient is negative.
    """

    dual_penetration: float
    contact: float
    fingertip: float
    control: float
    total: float
    inside_object_points: int
    inside_hand_vertices: int
    wrist_vector: np.ndarray

    def finite(self) -> bool:
        return bool(
            np.isfinite(
                [self.dual_penetration, self.contact, self.fingertip, self.control, self.total]
            ).all()
        )

    def to_dict(self) -> dict:
        return {
            "dual_penetration": self.dual_penetration,
            "contact": self.contact,
            "fingertip": self.fingertip,
            "control": self.control,
            "total": self.total,
            "inside_object_points": self.inside_object_points,
            "inside_hand_vertices": self.inside_hand_vertices,
            "wrist_vector": self.wrist_vector.tolist(),
        }


@dataclass(frozen=True)
class FrozenCorrespondences:
    """Discrete assignments captured at one configuration.

    object_points_inside: positions of object samples inside the hand;
    nearest_hand_vertex: hand vertex id paired with each of them.
    hand_inside_ids / nearest_object_point: the symmetric pairing for hand
    vertices inside the object. contact_ids / contact_targets: the contact
    support and its frozen closest surface points.
    """

    step: int
    coefficient: float
    object_points_inside: np.ndarray
    nearest_hand_vertex: np.ndarray
    hand_inside_ids: np.ndarray
    nearest_object_point: np.ndarray
    contact_ids: np.ndarray
    contact_targets: np.ndarray
    v_grasp: np.ndarray
    object_center: np.ndarray


def nearest_with_lowest_index(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Nearest reference point per query; exact ties go to the lowest index."""
    tree = cKDTree(points)
    k = min(4, len(points))
    dists, idx = tree.query(queries, k=k)
    if k == 1:
        return np.asarray(idx).reshape(-1)
    bound = dists[:, :1] * (1.0 + TIE_RTOL) + 1e-300
    tied = dists <= bound
    return np.where(tied, idx, np.iinfo(np.int64).max).min(axis=1)


def freeze_correspondences(
    asset: HandAsset,
    hand_vertices: np.ndarray,
    object_index: ProximityIndex,
    v_grasp: np.ndarray,
    object_center: np.ndarray,
    config: OptimizerConfig,
    step: int,
) -> FrozenCorrespondences:
    """Capture inside/outside sets and nearest-neighbor pairings."""
    samples = object_index.samples
    if samples is None or len(samples) == 0:
        raise ValueError("object index must carry surface samples")
    hand_grid = ParityGrid(hand_vertices, asset.faces)
    obj_inside_mask = hand_grid.inside(samples.points)
    obj_in = samples.points[obj_inside_mask]
    if len(obj_in):
        nearest_hand = nearest_with_lowest_index(hand_vertices, obj_in)
    else:
        nearest_hand = np.zeros(0, dtype=np.int64)

    hand_inside_mask = object_index.inside(hand_vertices).mask
    hand_in_ids = np.where(hand_inside_mask)[0].astype(np.int64)
    if len(hand_in_ids):
        sample_ids, _ = object_index.nearest_sample(hand_vertices[hand_in_ids])
        nearest_obj = samples.points[sample_ids]
    else:
        nearest_obj = np.zeros((0, 3))

    if config.contact_all_vertices:
        contact_ids = np.arange(len(hand_vertices), dtype=np.int64)
    else:
        contact_ids = asset.contact_vertices
    # Loss computations run against the sampled surface, so the contact
    # target is the nearest sample point.
    contact_sample_ids, _ = object_index.nearest_sample(hand_vertices[contact_ids])
    contact_targets = samples.points[contact_sample_ids]

    return FrozenCorrespondences(
        step=step,
        coefficient=config.fingertip_coefficient(step),
        object_points_inside=obj_in,
        nearest_hand_vertex=nearest_hand,
        hand_inside_ids=hand_in_ids,
        nearest_object_point=nearest_obj,
        contact_ids=np.asarray(contact_ids, dtype=np.int64),
        contact_targets=contact_targets,
        v_grasp=np.asarray(v_grasp, dtype=float),
        object_center=np.asarray(object_center, dtype=float),
    )


def control_loss(wrist: np.ndarray, object_center: np.ndarray, v_grasp: np.ndarray):
    """1 - cos(angle between wrist-to-center vector and the grasp direction).

    Returns (value, unit wrist vector).
    """
    u = object_center - wrist
    norm = np.linalg.norm(u)
    if norm < 1e-12:
        raise ValueError("wrist coincides with the object center")
    v_wrist = u / norm
    return 1.0 - float(v_wrist @ v_grasp), v_wrist


def evaluate_frozen(
    hand_vertices: np.ndarray,
    wrist: np.ndarray,
    fingertip_ids: np.ndarray,
    frozen: FrozenCorrespondences,
    config: OptimizerConfig,
) -> LossBreakdown:
    """Loss terms for given hand geometry under frozen correspondences."""
    dp = 0.0
    if len(frozen.object_points_inside):
        diff = frozen.object_points_inside - hand_vertices[frozen.nearest_hand_vertex]
        dp += float(np.einsum("ij,ij->", diff, diff))
    if len(frozen.hand_inside_ids):
        diff = hand_vertices[frozen.hand_inside_ids] - frozen.nearest_object_point
        dp += float(np.einsum("ij,ij->", diff, diff))

    cdiff = hand_vertices[frozen.contact_ids] - frozen.contact_targets
    contact = float(np.einsum("ij,ij->", cdiff, cdiff))

    tips = hand_vertices[fingertip_ids]
    tdiff = tips[0] - tips[1:]
    fingertip = frozen.coefficient * float(np.einsum("ij,ij->", tdiff, tdiff))

    control, v_wrist = control_loss(wrist, frozen.object_center, frozen.v_grasp)

    total = (
        config.alpha * dp
        + config.beta * contact
        + config.gamma * fingertip
        + config.delta * control
    )
    return LossBreakdown(
        dual_penetration=dp,
        contact=contact,
        fingertip=fingertip,
        control=control,
        total=total,
        inside_object_points=len(frozen.object_points_inside),
        inside_hand_vertices=len(frozen.hand_inside_ids),
        wrist_vector=v_wrist,
    )


def grasp_losses(
    asset: HandAsset,
    hand_vertices: np.ndarray,
    wrist: np.ndarray,
    object_index: ProximityIndex,
    v_grasp: np.ndarray,
    object_center: np.ndarray,
    config: OptimizerConfig,
    step: int,
) -> tuple[LossBreakdown, FrozenCorrespondences]:
    """Freeze correspondences at the current state and evaluate the loss."""
    frozen = freeze_correspondences(
        asset, hand_vertices, object_index, v_grasp, object_center, config, step
    )
    breakdown = evaluate_frozen(
        hand_vertices, wrist, asset.fingertip_vertices, frozen, config
    )
    return breakdown, frozen
