"""Dataset manifest parsing and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ManifestError

MANIFEST_FORMAT = "manifest-v1"

# Position offset ranges for the sampled handover target poses (meters).
DEFAULT_TARGET_RANGES = {
    "x": (-0.15, 0.15),
    "y": (-0.15, 0.15),
    "z": (0.10, 0.35),
}

DEFAULT_THRESHOLDS = {
    "max_penetration_m": 0.005,
    "min_contacts": 3,
    "max_direction_deviation_deg": 20.0,
    "max_width_m": 0.15,
}


@dataclass(frozen=True)
class ObjectEntry:
    object_id: str
    mesh_path: str
    scale: float = 1.0


@dataclass(frozen=True)
class DatasetManifest:
    """Batch job description; seeds make the output fully reproducible."""

    objects: tuple
    seed: int = 0
    hand: str = "test"  # "test" or a handasset-v1 path
    directions_per_object: int = 4
    robot_bearing: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    cone_half_angle_deg: float = 60.0
    target_ranges: dict = field(default_factory=lambda: dict(DEFAULT_TARGET_RANGES))
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    samples_per_object: int = 3000
    mirror_accepted: bool = True
    optimizer: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    output_dir: str = "bundle"

    def validate(self, base_dir: Path | None = None) -> None:
        if not self.objects:
            raise ManifestError("manifest lists no objects")
        ids = [o.object_id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ManifestError("duplicate object ids in manifest")
        if self.directions_per_object < 0:
            raise ManifestError("directions_per_object must be >= 0")
        if not 0.0 < self.cone_half_angle_deg <= 90.0:
            raise ManifestError("cone half-angle must lie in (0, 90] degrees")
        if abs(np.linalg.norm(self.robot_bearing) - 1.0) > 1e-6:
            raise ManifestError("robot bearing must be a unit vector")
        for axis in ("x", "y", "z"):
            lo, hi = self.target_ranges[axis]
            if lo > hi:
                raise ManifestError(f"target range {axis} is not ordered: {lo} > {hi}")
        if self.samples_per_object <= 0:
            raise ManifestError("samples_per_object must be positive")
        for entry in self.objects:
            if entry.scale <= 0:
                raise ManifestError(f"{entry.object_id}: scale must be positive")

    def resolve_mesh_path(self, entry: ObjectEntry, base_dir: Path) -> Path:
        p = Path(entry.mesh_path)
        return p if p.is_absolute() else base_dir / p

    def to_dict(self) -> dict:
        return {
            "format": MANIFEST_FORMAT,
            "seed": self.seed,
            "hand": self.hand,
            "objects": [
                {"id": o.object_id, "mesh": o.mesh_path, "scale": o.scale}
                for o in self.objects
            ],
            "directions_per_object": self.directions_per_object,
            "robot_bearing": np.asarray(self.robot_bearing, dtype=float).tolist(),
            "cone_half_angle_deg": self.cone_half_angle_deg,
            "target_ranges": {k: list(v) for k, v in self.target_ranges.items()},
            "thresholds": dict(self.thresholds),
            "samples_per_object": self.samples_per_object,
            "mirror_accepted": self.mirror_accepted,
            "optimizer": dict(self.optimizer),
            "timing": dict(self.timing),
            "output_dir": self.output_dir,
        }


def manifest_from_dict(doc: dict) -> DatasetManifest:
    if doc.get("format") != MANIFEST_FORMAT:
        raise ManifestError(
            f"expected manifest format {MANIFEST_FORMAT!r}, got {doc.get('format')!r}"
        )
    try:
        objects = tuple(
            ObjectEntry(
                object_id=str(o["id"]),
                mesh_path=str(o["mesh"]),
                scale=float(o.get("scale", 1.0)),
            )
            for o in doc["objects"]
        )
        ranges = {
            k: tuple(float(x) for x in v)
            for k, v in doc.get("target_ranges", DEFAULT_TARGET_RANGES).items()
        }
        thresholds = dict(DEFAULT_THRESHOLDS)
        thresholds.update(doc.get("thresholds", {}))
        manifest = DatasetManifest(
            objects=objects,
            seed=int(doc.get("seed", 0)),
            hand=str(doc.get("hand", "test")),
            directions_per_object=int(doc.get("directions_per_object", 4)),
            robot_bearing=np.asarray(doc.get("robot_bearing", [1.0, 0.0, 0.0]), dtype=float),
            cone_half_angle_deg=float(doc.get("cone_half_angle_deg", 60.0)),
            target_ranges=ranges,
            thresholds=thresholds,
            samples_per_object=int(doc.get("samples_per_object", 3000)),
            mirror_accepted=bool(doc.get("mirror_accepted", True)),
            optimizer=dict(doc.get("optimizer", {})),
            timing=dict(doc.get("timing", {})),
            output_dir=str(doc.get("output_dir", "bundle")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError(f"malformed manifest: {exc}") from exc
    manifest.validate()
    return manifest


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return manifest_from_dict(doc)


def save_manifest(manifest: DatasetManifest, path) -> None:
    Path(path).write_text(json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n")
