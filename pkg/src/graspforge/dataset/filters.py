"""Width filtering and geometric acceptance verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSet
from ..geometry.plane import principal_axes_2d, project_to_plane
from ..geometry.sampling import SurfaceSamples
from ..graspopt.optimize import GraspKeyframes
from ..motion.sequence import HandoverSequence

REASON_PENETRATION = "PenetrationExceeded"
REASON_CONTACTS = "TooFewContacts"
REASON_DEVIATION = "DirectionDeviation"
REASON_STANDOFF = "StandoffFailure"
REASON_NONFINITE = "NonFinite"


def grasp_width(samples: SurfaceSamples, direction: np.ndarray) -> float:
    """Narrowest in-plane extent of the object seen along a grasp direction.

    The extent of the projected samples along the minor principal direction;
    isotropic projections fall back to the smaller bounding-box extent.
    """
    projection = project_to_plane(samples.points, np.asarray(direction, dtype=float))
    coords = projection.coords
    try:
        axes = principal_axes_2d(coords)
        degenerate = axes.degenerate
    except DegenerateSet:
        degenerate = True
        axes = None
    if degenerate or axes is None:
        extents = coords.max(axis=0) - coords.min(axis=0)
        return float(extents.min())
    along = coords @ axes.minor
    return float(along.max() - along.min())


def filter_object(
    samples: SurfaceSamples, directions: np.ndarray, max_width: float = 0.15
) -> tuple[np.ndarray, bool]:
    """Per-direction pass mask plus an overall keep flag.

    A direction passes when the narrowest projected width does not exceed
    the gripper limit; the object is kept if at least one direction passes.
    """
    directions = np.asarray(directions, dtype=float).reshape(-1, 3)
    mask = np.array(
        [grasp_width(samples, d) <= max_width for d in directions], dtype=bool
    )
    return mask, bool(mask.any())


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reasons: tuple
    metrics: dict

    def __post_init__(self):
        if self.accepted and self.reasons:
            raise ValueError("accepted verdicts carry no reason codes")
        if not self.accepted and not self.reasons:
            raise ValueError("rejected verdicts need at least one reason code")

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "reasons": list(self.reasons),
            "metrics": dict(self.metrics),
        }


def accept_sequence(
    keyframes: GraspKeyframes,
    sequence: HandoverSequence | None,
    thresholds: dict,
) -> Verdict:
    """Geometric stand-in for physics-based handover success filtering.

    Bounds are inclusive; every metric must also be finite.
    """
    q = keyframes.quality
    metrics = {
        "max_penetration_m": q.max_penetration,
        "contact_count": q.contact_count,
        "direction_deviation_deg": q.direction_deviation_deg,
    }
    reasons = []
    finite = (
        np.isfinite(q.max_penetration)
        and np.isfinite(q.direction_deviation_deg)
        and np.isfinite(keyframes.trace).all()
    )
    if sequence is not None:
        finite = finite and bool(np.isfinite(sequence.hand_pose_array()).all())
        finite = finite and bool(np.isfinite(sequence.feature_array()).all())
    if not finite:
        reasons.append(REASON_NONFINITE)
    if q.max_penetration > thresholds["max_penetration_m"]:
        reasons.append(REASON_PENETRATION)
    if q.contact_count < thresholds["min_contacts"]:
        reasons.append(REASON_CONTACTS)
    if q.direction_deviation_deg > thresholds["max_direction_deviation_deg"]:
        reasons.append(REASON_DEVIATION)
    return Verdict(accepted=not reasons, reasons=tuple(reasons), metrics=metrics)
