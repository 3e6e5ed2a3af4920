"""Command-line front end.

Subcommands: grasp, dataset, mirror, eval, hand. Human-readable logs go to
stderr; machine-readable results are written to files only. Exit codes:
0 success, 2 input error, 3 optimization failure, 4 partial batch failure.

Configuration precedence: built-in defaults, then a JSON config file
(--config flag or the GRASPFORGE_CONFIG environment variable), then
explicit command-line flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .dataset.generate import generate_dataset
from .dataset.manifest import load_manifest
from .errors import (
    GraspForgeError,
    ManifestError,
    NoCollisionFreeStandoff,
    NonFinite,
    ParseError,
)
from .geometry.mesh import load_mesh
from .geometry.queries import ProximityIndex
from .geometry.sampling import sample_surface
from .graspopt.config import OptimizerConfig
from .graspopt.optimize import (
    compute_quality,
    load_keyframes,
    make_grasp_request,
    optimize_grasp,
    save_keyframes,
)
from .handmodel.asset import load_hand_asset, save_hand_asset
from .handmodel.testasset import build_test_asset
from .motion.io import load_sequence_jsonl, save_sequence_jsonl
from .motion.sequence import mirror_sequence

log = logging.getLogger("graspforge")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_OPTIMIZATION = 3
EXIT_PARTIAL = 4

CONFIG_ENV = "GRASPFORGE_CONFIG"

_DEFAULTS = {
    "scale": 1.0,
    "seed": 0,
    "samples": 3000,
    "workers": 1,
    "optimizer": {},
    "timing": {},
}


def resolve_config(args: argparse.Namespace) -> dict:
    """defaults <- config file <- flags; later layers win."""
    config = {k: (dict(v) if isinstance(v, dict) else v) for k, v in _DEFAULTS.items()}
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read config file {path}: {exc}") from exc
        for key in _DEFAULTS:
            if key in doc:
                if isinstance(_DEFAULTS[key], dict):
                    config[key] = dict(doc[key])
                else:
                    config[key] = doc[key]
    for key in ("scale", "seed", "samples", "workers"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def _load_hand(spec: str):
    return build_test_asset() if spec == "test" else load_hand_asset(spec)


def _parse_direction(text: str) -> np.ndarray:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad direction {text!r}: {exc}") from exc
    if len(parts) != 3:
        raise ParseError(f"direction needs 3 components, got {len(parts)}")
    direction = np.array(parts)
    if np.linalg.norm(direction) < 1e-12:
        raise ParseError("zero grasp direction")
    return direction


def cmd_grasp(args: argparse.Namespace) -> int:
    try:
        config = resolve_config(args)
        log.info("resolved config: %s", json.dumps(config, sort_keys=True))
        direction = _parse_direction(args.dir)
        asset = _load_hand(args.hand)
        mesh = load_mesh(args.mesh, scale=config["scale"])
        opt = OptimizerConfig.from_dict(config["optimizer"])
        request = make_grasp_request(
            mesh,
            asset,
            direction,
            opt,
            n_samples=config["samples"],
            seed=config["seed"],
            provenance={
                "mesh_path": str(Path(args.mesh).resolve()),
                "scale": config["scale"],
                "hand": args.hand,
            },
        )
    except (GraspForgeError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    try:
        keyframes = optimize_grasp(request)
    except (NonFinite, NoCollisionFreeStandoff) as exc:
        log.error("optimization failed: %s", exc)
        return EXIT_OPTIMIZATION
    save_keyframes(keyframes, args.out)
    q = keyframes.quality
    log.info(
        "grasp: penetration %.2f mm, %d contacts, deviation %.2f deg -> %s",
        q.max_penetration * 1000.0,
        q.contact_count,
        q.direction_deviation_deg,
        args.out,
    )
    return EXIT_OK


def cmd_dataset(args: argparse.Namespace) -> int:
    try:
        config = resolve_config(args)
        log.info("resolved config: %s", json.dumps(config, sort_keys=True))
        manifest_path = Path(args.manifest).resolve()
        manifest = load_manifest(manifest_path)
        bundle = generate_dataset(
            manifest,
            base_dir=manifest_path.parent,
            output_dir=args.out,
            workers=config["workers"],
        )
    except ManifestError as exc:
        log.error("manifest error: %s", exc)
        return EXIT_INPUT
    except GraspForgeError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    stats = bundle.stats
    log.info("stats: %s", json.dumps({k: v for k, v in stats.items()}, sort_keys=True))
    if stats["errored"] and not args.allow_partial:
        log.error("%d records errored; rerun with --allow-partial to accept", stats["errored"])
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_mirror(args: argparse.Namespace) -> int:
    try:
        seq = load_sequence_jsonl(args.input)
        prov = seq.provenance
        asset = _load_hand(prov.get("hand", "test"))
        mesh_path = prov.get("mesh_path")
        if not mesh_path or not Path(mesh_path).exists():
            raise ParseError(f"sequence provenance mesh not found: {mesh_path!r}")
        mesh = load_mesh(mesh_path, scale=prov.get("scale", 1.0))
        samples = sample_surface(mesh, 3000, prov.get("samples_seed", 0))
        index = ProximityIndex(mesh, samples)
        mirrored = mirror_sequence(seq, asset, index)
    except GraspForgeError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    save_sequence_jsonl(mirrored, args.out)
    log.info("mirrored %d frames (%s hand) -> %s", len(mirrored), mirrored.chirality, args.out)
    return EXIT_OK


def _eval_keyframes(path: Path) -> dict:
    keyframes = load_keyframes(path)
    prov = keyframes.provenance
    mesh = load_mesh(prov["mesh_path"], scale=prov.get("scale", 1.0))
    asset = _load_hand(prov.get("hand", "test"))
    samples = sample_surface(mesh, prov.get("num_samples", 3000), prov.get("samples_seed", 0))
    index = ProximityIndex(mesh, samples)
    quality = compute_quality(
        asset,
        keyframes.grasp,
        index,
        np.asarray(prov["grasp_direction"]),
        samples.centroid,
        keyframes.config,
    )
    stored = keyframes.quality
    diffs = [
        abs(quality.max_penetration - stored.max_penetration),
        abs(float(quality.contact_count - stored.contact_count)),
        abs(quality.direction_deviation_deg - stored.direction_deviation_deg),
    ]
    return {
        "path": str(path),
        "stored": stored.to_dict(),
        "recomputed": quality.to_dict(),
        "max_abs_difference": max(diffs),
        "matches": max(diffs) <= 1e-9,
    }


def cmd_eval(args: argparse.Namespace) -> int:
    target = Path(args.input)
    try:
        if target.is_dir():
            index_doc = json.loads((target / "index.json").read_text())
            entries = []
            for rec in index_doc["records"]:
                rec_doc = json.loads((target / rec["path"]).read_text())
                if rec_doc.get("keyframes_path"):
                    entries.append(_eval_keyframes(target / rec_doc["keyframes_path"]))
            report = {
                "evaluated": len(entries),
                "all_match": all(e["matches"] for e in entries),
                "entries": entries,
            }
        else:
            report = _eval_keyframes(target)
    except (GraspForgeError, OSError, json.JSONDecodeError, KeyError) as exc:
        log.error("cannot evaluate %s: %s", target, exc)
        return EXIT_INPUT
    Path(args.report).write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    ok = report.get("matches", report.get("all_match"))
    log.info("eval: %s -> %s (matches=%s)", target, args.report, ok)
    return EXIT_OK


def cmd_hand(args: argparse.Namespace) -> int:
    if args.hand_command == "build-test-asset":
        asset = build_test_asset()
        save_hand_asset(asset, args.out)
        log.info(
            "test asset: %d vertices, %d faces -> %s",
            asset.num_vertices,
            len(asset.faces),
            args.out,
        )
        return EXIT_OK
    log.error("unknown hand subcommand")
    return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graspforge",
        description="Direction-controllable grasp synthesis and handover sequences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_grasp = sub.add_parser("grasp", help="optimize one grasp on a mesh")
    p_grasp.add_argument("--mesh", required=True)
    p_grasp.add_argument("--scale", type=float, default=None)
    p_grasp.add_argument("--dir", required=True, help="grasp direction as x,y,z")
    p_grasp.add_argument("--hand", default="test", help='"test" or a handasset-v1 path')
    p_grasp.add_argument("--out", required=True)
    p_grasp.add_argument("--seed", type=int, default=None)
    p_grasp.add_argument("--samples", type=int, default=None)
    p_grasp.add_argument("--config", default=None)
    p_grasp.set_defaults(func=cmd_grasp)

    p_data = sub.add_parser("dataset", help="generate a dataset bundle from a manifest")
    p_data.add_argument("--manifest", required=True)
    p_data.add_argument("--workers", type=int, default=None)
    p_data.add_argument("--allow-partial", action="store_true")
    p_data.add_argument("--out", default=None)
    p_data.add_argument("--config", default=None)
    p_data.set_defaults(func=cmd_dataset)

    p_mirror = sub.add_parser("mirror", help="mirror a handover sequence")
    p_mirror.add_argument("--in", dest="input", required=True)
    p_mirror.add_argument("--out", required=True)
    p_mirror.set_defaults(func=cmd_mirror)

    p_eval = sub.add_parser("eval", help="recompute quality metrics and compare")
    p_eval.add_argument("--in", dest="input", required=True, help="keyframes file or bundle dir")
    p_eval.add_argument("--report", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_hand = sub.add_parser("hand", help="hand asset utilities")
    hand_sub = p_hand.add_subparsers(dest="hand_command", required=True)
    p_build = hand_sub.add_parser("build-test-asset", help="write the procedural test hand")
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=cmd_hand)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
