"""Skinned parametric hand asset and its on-disk container.

The asset is a neutral container (template mesh, kinematic tree, skinning
weights, low-dimensional pose basis) rather than any specific third-party
hand model release. A converter stub below documents the field mapping
expected from MANO-style model files; the repository itself ships only the
procedural test asset.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..errors import ParseError

NUM_JOINTS = 16
NUM_FINGER_JOINTS = 15
NUM_ANGLES = NUM_FINGER_JOINTS * 3
NUM_POSE_COEFFS = 15

FORMAT_TAG = "handasset-v1"

# Mirror pattern for per-joint rotation vectors under the x-reflection:
# conjugating R(a) by diag(-1, 1, 1) maps the rotation vector to (ax, -ay, -az).
_ANGLE_MIRROR = np.tile(np.array([1.0, -1.0, -1.0]), NUM_FINGER_JOINTS)


@dataclass(frozen=True)
class HandAsset:
    """Template hand with kinematic tree, skinning weights, and pose basis.

    template: (V, 3) flat-pose vertices, meters, hand in the xz-plane with
        the palm facing -y. faces: (T, 3). parents: (16,) tree with the
        wrist at index 0. rest_joints: (16, 3). weights: (V, 16), rows sum
        to 1. pose_mean (45,) and pose_basis (45, 15) define joint rotation
        vectors as mean + basis @ theta. theta_flat is the coefficient
        vector of the flat pose. fingertip_vertices holds template vertex
        ids for (thumb, index, middle, ring, pinky). contact_vertices is
        the palmar-side subset used by contact objectives.
    """

    template: np.ndarray
    faces: np.ndarray
    parents: np.ndarray
    rest_joints: np.ndarray
    weights: np.ndarray
    pose_mean: np.ndarray
    pose_basis: np.ndarray
    theta_flat: np.ndarray
    fingertip_vertices: np.ndarray
    contact_vertices: np.ndarray
    chirality: str = "right"

    def __post_init__(self):
        for name in (
            "template",
            "faces",
            "parents",
            "rest_joints",
            "weights",
            "pose_mean",
            "pose_basis",
            "theta_flat",
            "fingertip_vertices",
            "contact_vertices",
        ):
            getattr(self, name).setflags(write=False)

    @property
    def num_vertices(self) -> int:
        return len(self.template)

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        v = self.num_vertices
        if self.weights.shape != (v, NUM_JOINTS):
            raise ValueError(f"weights shape {self.weights.shape} != ({v}, {NUM_JOINTS})")
        if (self.weights < -1e-12).any():
            raise ValueError("negative skinning weights")
        row_sums = self.weights.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > 1e-6:
            raise ValueError("skinning weight rows must sum to 1")
        if self.parents.shape != (NUM_JOINTS,) or self.parents[0] != -1:
            raise ValueError("kinematic tree must have the wrist at index 0")
        for j in range(1, NUM_JOINTS):
            if not 0 <= self.parents[j] < j:
                raise ValueError("parents must precede children (rooted tree)")
        if self.pose_basis.shape != (NUM_ANGLES, NUM_POSE_COEFFS):
            raise ValueError(f"pose basis shape {self.pose_basis.shape}")
        if np.linalg.matrix_rank(self.pose_basis) != NUM_POSE_COEFFS:
            raise ValueError("pose basis columns are linearly dependent")
        if self.fingertip_vertices.shape != (5,):
            raise ValueError("need 5 fingertip landmark ids")
        if self.faces.min() < 0 or self.faces.max() >= v:
            raise ValueError("face index out of range")
        if self.chirality not in ("right", "left"):
            raise ValueError(f"bad chirality {self.chirality!r}")

    def hand_length(self) -> float:
        """Wrist to middle fingertip distance in the flat template."""
        middle_tip = self.template[self.fingertip_vertices[2]]
        return float(np.linalg.norm(middle_tip - self.rest_joints[0]))

    def mirrored(self) -> "HandAsset":
        """Reflection across x=0: opposite chirality, same topology."""
        template = self.template.copy()
        template[:, 0] = -template[:, 0]
        rest = self.rest_joints.copy()
        rest[:, 0] = -rest[:, 0]
        return replace(
            self,
            template=template,
            faces=self.faces[:, ::-1].copy(),
            rest_joints=rest,
            pose_mean=_ANGLE_MIRROR * self.pose_mean,
            pose_basis=_ANGLE_MIRROR[:, None] * self.pose_basis,
            chirality="left" if self.chirality == "right" else "right",
        )


def _encode(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _decode(text: str, shape) -> np.ndarray:
    raw = base64.b64decode(text.encode("ascii"))
    return np.frombuffer(raw, dtype="<f8").reshape(shape).astype(float)


def save_hand_asset(asset: HandAsset, path) -> None:
    doc = {
        "format": FORMAT_TAG,
        "chirality": asset.chirality,
        "num_vertices": asset.num_vertices,
        "template": _encode(asset.template),
        "rest_joints": _encode(asset.rest_joints),
        "weights": _encode(asset.weights),
        "pose_mean": _encode(asset.pose_mean),
        "pose_basis": _encode(asset.pose_basis),
        "theta_flat": _encode(asset.theta_flat),
        "faces": asset.faces.tolist(),
        "parents": asset.parents.tolist(),
        "fingertip_vertices": asset.fingertip_vertices.tolist(),
        "contact_vertices": asset.contact_vertices.tolist(),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True) + "\n")


def load_hand_asset(path) -> HandAsset:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read hand asset {path}: {exc}") from exc
    if doc.get("format") != FORMAT_TAG:
        raise ParseError(f"{path}: expected format {FORMAT_TAG!r}, got {doc.get('format')!r}")
    v = int(doc["num_vertices"])
    asset = HandAsset(
        template=_decode(doc["template"], (v, 3)),
        faces=np.array(doc["faces"], dtype=np.int64),
        parents=np.array(doc["parents"], dtype=np.int64),
        rest_joints=_decode(doc["rest_joints"], (NUM_JOINTS, 3)),
        weights=_decode(doc["weights"], (v, NUM_JOINTS)),
        pose_mean=_decode(doc["pose_mean"], (NUM_ANGLES,)),
        pose_basis=_decode(doc["pose_basis"], (NUM_ANGLES, NUM_POSE_COEFFS)),
        theta_flat=_decode(doc["theta_flat"], (NUM_POSE_COEFFS,)),
        fingertip_vertices=np.array(doc["fingertip_vertices"], dtype=np.int64),
        contact_vertices=np.array(doc["contact_vertices"], dtype=np.int64),
        chirality=doc["chirality"],
    )
    asset.validate()
    return asset


def convert_mano_model(model_path, output_path) -> None:
    """Stub documenting the mapping from a MANO-style pickle to handasset-v1.

    Expected source fields and their destinations:

    - ``v_template`` (778, 3)        -> template (after orienting the flat
      hand into the xz-plane with the palm toward -y)
    - ``f`` (1538, 3)                -> faces
    - ``J`` (16, 3) regressed joints -> rest_joints
    - ``weights`` (778, 16)          -> weights
    - ``hands_mean`` (45,)           -> pose_mean
    - ``hands_components`` (45, 45)  -> pose_basis (first 15 columns)
    - flat-pose coefficients solved from ``hands_mean`` -> theta_flat
    - fingertip vertex ids and a palmar vertex mask must be supplied by the
      caller; they are not part of MANO releases.

    Shape blend weights and pose correctives are intentionally not mapped;
    this pipeline uses plain linear blend skinning.
    """
    raise NotImplementedError(
        "third-party hand models are not bundled; see the docstring for the field mapping"
    )
