"""Batch dataset construction with a deterministic worker pool.

Every record is a pure function of (manifest seed, object id, direction
index), so the bundle content is byte-identical regardless of worker count
or completion order. Wall-clock timing is reported in memory and on the log
stream only; the serialized bundle stays reproducible.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import GraspForgeError, NoCollisionFreeStandoff, NonFinite
from ..geometry.mesh import load_mesh
from ..geometry.queries import ProximityIndex
from ..geometry.sampling import sample_surface
from ..graspopt.config import OptimizerConfig
from ..graspopt.optimize import make_grasp_request, optimize_grasp, save_keyframes
from ..handmodel.asset import load_hand_asset
from ..handmodel.testasset import build_test_asset
from ..motion.io import save_sequence_jsonl
from ..motion.sequence import TimingConfig, mirror_sequence, synthesize_handover
from ..rotations import RigidTransform
from .filters import REASON_NONFINITE, REASON_STANDOFF, accept_sequence, grasp_width
from .manifest import DatasetManifest
from .sampling import derive_seed, sample_grasp_directions, sample_target_pose

log = logging.getLogger(__name__)

RECORD_FORMAT = "sequencerecord-v1"
INDEX_FORMAT = "bundle-index-v1"


@dataclass(frozen=True)
class DatasetBundle:
    records: tuple
    stats: dict
    output_dir: Path


def _load_asset(spec: str):
    return build_test_asset() if spec == "test" else load_hand_asset(spec)


def _timing_from_dict(doc: dict) -> TimingConfig:
    known = {f for f in TimingConfig.__dataclass_fields__}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown timing keys: {sorted(unknown)}")
    return TimingConfig(**doc)


def _record_path(object_id: str, direction_index: int) -> str:
    return f"records/{object_id}/{direction_index}.json"


def _run_record(args: dict) -> dict:
    """Worker entry: one (object, direction) job end to end."""
    manifest = DatasetManifest(**{**args["manifest_kwargs"]})
    entry_id = args["object_id"]
    mesh_path = args["mesh_path"]
    scale = args["scale"]
    k = args["direction_index"]
    direction = np.asarray(args["direction"], dtype=float)
    out_dir = Path(args["output_dir"])

    record = {
        "format": RECORD_FORMAT,
        "object": entry_id,
        "direction_index": k,
        "grasp_direction": direction.tolist(),
        "status": "error",
        "reasons": [],
        "metrics": None,
        "width_m": args.get("width_m"),
        "target": None,
        "keyframes_path": None,
        "sequence_path": None,
        "mirrored_sequence_path": None,
        "error": None,
        "seeds": {
            "samples": derive_seed(manifest.seed, entry_id, "samples"),
            "target": derive_seed(manifest.seed, entry_id, k, "target"),
        },
    }
    try:
        asset = _load_asset(manifest.hand)
        theta_pre = np.asarray(args["theta_pre"], dtype=float)
        config = OptimizerConfig.from_dict(manifest.optimizer)
        timing = _timing_from_dict(manifest.timing)
        mesh = load_mesh(mesh_path, scale=scale)
        request = make_grasp_request(
            mesh,
            asset,
            direction,
            config,
            n_samples=manifest.samples_per_object,
            seed=record["seeds"]["samples"],
            theta_pre=theta_pre,
            provenance={"mesh_path": str(mesh_path), "scale": scale, "hand": manifest.hand},
        )
        try:
            keyframes = optimize_grasp(request)
        except NoCollisionFreeStandoff as exc:
            record["status"] = "rejected"
            record["reasons"] = [REASON_STANDOFF]
            record["error"] = str(exc)
            return record
        except NonFinite as exc:
            record["status"] = "rejected"
            record["reasons"] = [REASON_NONFINITE]
            record["error"] = str(exc)
            return record

        target = sample_target_pose(
            RigidTransform.identity(), manifest.target_ranges, record["seeds"]["target"]
        )
        sequence = synthesize_handover(
            keyframes,
            asset,
            request.index,
            RigidTransform.identity(),
            target,
            timing,
            provenance={
                "object": entry_id,
                "mesh_path": str(mesh_path),
                "scale": scale,
                "hand": manifest.hand,
                "grasp_direction": direction.tolist(),
                "samples_seed": record["seeds"]["samples"],
                "target_seed": record["seeds"]["target"],
            },
        )
        verdict = accept_sequence(keyframes, sequence, manifest.thresholds)
        record["metrics"] = verdict.metrics
        record["target"] = {
            "translation": target.transform.translation.tolist(),
            "rotvec": target.transform.rotvec().tolist(),
        }
        rec_dir = out_dir / "records" / entry_id
        rec_dir.mkdir(parents=True, exist_ok=True)
        kf_path = rec_dir / f"{k}.keyframes.json"
        seq_path = rec_dir / f"{k}.sequence.jsonl"
        save_keyframes(keyframes, kf_path)
        save_sequence_jsonl(sequence, seq_path)
        record["keyframes_path"] = str(kf_path.relative_to(out_dir))
        record["sequence_path"] = str(seq_path.relative_to(out_dir))
        if verdict.accepted:
            record["status"] = "accepted"
            if manifest.mirror_accepted:
                mirrored = mirror_sequence(sequence, asset, request.index)
                mir_path = rec_dir / f"{k}.mirror.jsonl"
                save_sequence_jsonl(mirrored, mir_path)
                record["mirrored_sequence_path"] = str(mir_path.relative_to(out_dir))
        else:
            record["status"] = "rejected"
            record["reasons"] = list(verdict.reasons)
        return record
    except GraspForgeError as exc:
        record["status"] = "error"
        record["error"] = f"{type(exc).__name__}: {exc}"
        return record


def _write_record(record: dict, out_dir: Path) -> None:
    path = out_dir / _record_path(record["object"], record["direction_index"])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, sort_keys=True) + "\n")


def generate_dataset(
    manifest: DatasetManifest,
    base_dir: Path | str = ".",
    output_dir: Path | str | None = None,
    workers: int = 1,
) -> DatasetBundle:
    """Filter, optimize, synthesize, and score every (object, direction) job.

    Per-object errors are recorded in the bundle and never abort the batch.
    """
    start = time.monotonic()
    manifest.validate()
    base_dir = Path(base_dir)
    out_dir = Path(output_dir) if output_dir is not None else base_dir / manifest.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    asset = _load_asset(manifest.hand)
    config = OptimizerConfig.from_dict(manifest.optimizer)
    from ..graspopt.pregrasp import optimize_finger_pregrasp

    theta_pre = optimize_finger_pregrasp(asset, config)

    jobs = []
    records = []
    filtered_directions = 0
    for entry in manifest.objects:
        mesh_path = manifest.resolve_mesh_path(entry, base_dir)
        directions = sample_grasp_directions(
            manifest.robot_bearing,
            manifest.directions_per_object,
            manifest.cone_half_angle_deg,
            derive_seed(manifest.seed, entry.object_id, "directions"),
        )
        try:
            mesh = load_mesh(mesh_path, scale=entry.scale)
            samples = sample_surface(
                mesh,
                manifest.samples_per_object,
                derive_seed(manifest.seed, entry.object_id, "samples"),
            )
            widths = [grasp_width(samples, d) for d in directions]
        except GraspForgeError as exc:
            for k, d in enumerate(directions):
                records.append(
                    {
                        "format": RECORD_FORMAT,
                        "object": entry.object_id,
                        "direction_index": k,
                        "grasp_direction": d.tolist(),
                        "status": "error",
                        "reasons": [],
                        "metrics": None,
                        "width_m": None,
                        "target": None,
                        "keyframes_path": None,
                        "sequence_path": None,
                        "mirrored_sequence_path": None,
                        "error": f"{type(exc).__name__}: {exc}",
                        "seeds": {},
                    }
                )
            continue
        max_width = manifest.thresholds["max_width_m"]
        for k, d in enumerate(directions):
            if widths[k] > max_width:
                filtered_directions += 1
                records.append(
                    {
                        "format": RECORD_FORMAT,
                        "object": entry.object_id,
                        "direction_index": k,
                        "grasp_direction": d.tolist(),
                        "status": "filtered",
                        "reasons": [],
                        "metrics": None,
                        "width_m": widths[k],
                        "target": None,
                        "keyframes_path": None,
                        "sequence_path": None,
                        "mirrored_sequence_path": None,
                        "error": None,
                        "seeds": {},
                    }
                )
            else:
                jobs.append(
                    {
                        "manifest_kwargs": _manifest_kwargs(manifest),
                        "object_id": entry.object_id,
                        "mesh_path": str(mesh_path),
                        "scale": entry.scale,
                        "direction_index": k,
                        "direction": d.tolist(),
                        "width_m": widths[k],
                        "theta_pre": theta_pre.tolist(),
                        "output_dir": str(out_dir),
                    }
                )

    if workers <= 1 or len(jobs) <= 1:
        results = [_run_record(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_record, jobs))
    records.extend(results)
    records.sort(key=lambda r: (r["object"], r["direction_index"]))
    for record in records:
        _write_record(record, out_dir)

    stats = _compute_stats(manifest, records, filtered_directions)
    (out_dir / "stats.json").write_text(json.dumps(stats, sort_keys=True, indent=2) + "\n")
    index = {
        "format": INDEX_FORMAT,
        "manifest": manifest.to_dict(),
        "records": [
            {
                "object": r["object"],
                "direction_index": r["direction_index"],
                "path": _record_path(r["object"], r["direction_index"]),
                "status": r["status"],
                "mirrored_sequence_path": r["mirrored_sequence_path"],
            }
            for r in records
        ],
    }
    (out_dir / "index.json").write_text(json.dumps(index, sort_keys=True, indent=2) + "\n")
    wall_clock = time.monotonic() - start
    log.info(
        "dataset: %d records (%d accepted, %d rejected, %d errored, %d filtered) in %.1fs",
        len(records),
        stats["accepted"],
        stats["rejected"],
        stats["errored"],
        stats["filtered_directions"],
        wall_clock,
    )
    stats_mem = dict(stats, wall_clock_s=wall_clock)
    return DatasetBundle(records=tuple(records), stats=stats_mem, output_dir=out_dir)


def _manifest_kwargs(manifest: DatasetManifest) -> dict:
    return {
        "objects": manifest.objects,
        "seed": manifest.seed,
        "hand": manifest.hand,
        "directions_per_object": manifest.directions_per_object,
        "robot_bearing": manifest.robot_bearing,
        "cone_half_angle_deg": manifest.cone_half_angle_deg,
        "target_ranges": manifest.target_ranges,
        "thresholds": manifest.thresholds,
        "samples_per_object": manifest.samples_per_object,
        "mirror_accepted": manifest.mirror_accepted,
        "optimizer": manifest.optimizer,
        "timing": manifest.timing,
        "output_dir": manifest.output_dir,
    }


def _compute_stats(manifest: DatasetManifest, records: list, filtered_directions: int) -> dict:
    accepted = sum(1 for r in records if r["status"] == "accepted")
    rejected = sum(1 for r in records if r["status"] == "rejected")
    errored = sum(1 for r in records if r["status"] == "error")
    mirrored = sum(1 for r in records if r["mirrored_sequence_path"])
    # Histogram over the primary (first) reason so the counts sum to the
    # number of rejected records; records keep their full reason lists.
    reason_hist: dict = {}
    for r in records:
        if r["status"] == "rejected" and r["reasons"]:
            reason_hist[r["reasons"][0]] = reason_hist.get(r["reasons"][0], 0) + 1
    return {
        "objects": len(manifest.objects),
        "directions_total": len(manifest.objects) * manifest.directions_per_object,
        "filtered_directions": filtered_directions,
        "attempted": accepted + rejected + errored,
        "accepted": accepted,
        "rejected": rejected,
        "errored": errored,
        "mirrored": mirrored,
        "rejection_reasons": reason_hist,
    }
