"""Handover sequence serialization: JSON lines and a binary twin.

JSONL: a header object on the first line, then one frame per line with the
timestamp, the 21 hand pose floats, the object pose as translation +
rotation vector + angle (7 floats), and the per-joint SDF feature vector.

Binary: 16-byte header (8-byte magic "HOSEQ001", uint32 frame count,
uint32 values per frame, little-endian), then float64 rows in the same
order as the JSONL frames.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import ParseError
from ..handmodel.pose import HandPose
from ..rotations import RigidTransform
from .sequence import Frame, HandoverSequence

JSONL_FORMAT = "hoseq-jsonl-v1"
BINARY_MAGIC = b"HOSEQ001"


def _object_pose_floats(transform: RigidTransform) -> list[float]:
    rotvec = transform.rotvec()
    return [*transform.translation.tolist(), *rotvec.tolist(), float(np.linalg.norm(rotvec))]


def _object_pose_from_floats(values) -> RigidTransform:
    values = np.asarray(values, dtype=float)
    return RigidTransform.from_aa(values[3:6], values[:3])


def _header(seq: HandoverSequence) -> dict:
    return {
        "format": JSONL_FORMAT,
        "frame_rate": seq.frame_rate,
        "frames": len(seq),
        "phases": {k: list(v) for k, v in seq.phases.items()},
        "chirality": seq.chirality,
        "feature_size": int(len(seq.frames[0].sdf_features)) if len(seq) else 0,
        "provenance": seq.provenance,
    }


def save_sequence_jsonl(seq: HandoverSequence, path) -> None:
    lines = [json.dumps(_header(seq), sort_keys=True)]
    for f in seq.frames:
        record = {
            "t": f.timestamp,
            "hand": f.hand_pose.to_params().tolist(),
            "object": _object_pose_floats(f.object_pose),
            "sdf": f.sdf_features.tolist(),
        }
        lines.append(json.dumps(record, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n")


def load_sequence_jsonl(path) -> HandoverSequence:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
        header = json.loads(lines[0])
    except (OSError, json.JSONDecodeError, IndexError) as exc:
        raise ParseError(f"cannot read sequence {path}: {exc}") from exc
    if header.get("format") != JSONL_FORMAT:
        raise ParseError(f"{path}: expected format {JSONL_FORMAT!r}, got {header.get('format')!r}")
    frames = []
    try:
        for line in lines[1 : 1 + int(header["frames"])]:
            rec = json.loads(line)
            frames.append(
                Frame(
                    timestamp=float(rec["t"]),
                    hand_pose=HandPose.from_params(np.array(rec["hand"])),
                    object_pose=_object_pose_from_floats(rec["object"]),
                    sdf_features=np.array(rec["sdf"], dtype=float),
                )
            )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: malformed frame record: {exc}") from exc
    return HandoverSequence(
        frames=tuple(frames),
        frame_rate=float(header["frame_rate"]),
        phases={k: tuple(v) for k, v in header["phases"].items()},
        chirality=header["chirality"],
        provenance=header.get("provenance", {}),
    )


def save_sequence_binary(seq: HandoverSequence, path) -> None:
    feature_size = len(seq.frames[0].sdf_features) if len(seq) else 0
    per_frame = 1 + 21 + 7 + feature_size
    rows = np.empty((len(seq), per_frame))
    for i, f in enumerate(seq.frames):
        rows[i, 0] = f.timestamp
        rows[i, 1:22] = f.hand_pose.to_params()
        rows[i, 22:29] = _object_pose_floats(f.object_pose)
        rows[i, 29:] = f.sdf_features
    header = BINARY_MAGIC + struct.pack("<II", len(seq), per_frame)
    Path(path).write_bytes(header + rows.astype("<f8").tobytes())


def load_sequence_binary(path, frame_rate: float, phases: dict, chirality: str) -> list[Frame]:
    """Read the binary frame rows; sequence metadata comes from the caller."""
    raw = Path(path).read_bytes()
    if raw[:8] != BINARY_MAGIC:
        raise ParseError(f"{path}: bad magic {raw[:8]!r}")
    count, per_frame = struct.unpack("<II", raw[8:16])
    rows = np.frombuffer(raw[16:], dtype="<f8").reshape(count, per_frame)
    frames = []
    for row in rows:
        frames.append(
            Frame(
                timestamp=float(row[0]),
                hand_pose=HandPose.from_params(row[1:22]),
                object_pose=_object_pose_from_floats(row[22:29]),
                sdf_features=row[29:].copy(),
            )
        )
    return frames
