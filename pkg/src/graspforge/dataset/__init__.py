"""Batch dataset construction: filtering, sampling, generation, verdicts."""

from .filters import Verdict, accept_sequence, filter_object, grasp_width
from .generate import DatasetBundle, generate_dataset
from .manifest import (
    DEFAULT_TARGET_RANGES,
    DEFAULT_THRESHOLDS,
    DatasetManifest,
    ObjectEntry,
    load_manifest,
    manifest_from_dict,
    save_manifest,
)
from .sampling import derive_seed, sample_grasp_directions, sample_target_pose

__all__ = [
    "DatasetBundle",
    "DatasetManifest",
    "ObjectEntry",
    "Verdict",
    "DEFAULT_TARGET_RANGES",
    "DEFAULT_THRESHOLDS",
    "accept_sequence",
    "derive_seed",
    "filter_object",
    "generate_dataset",
    "grasp_width",
    "load_manifest",
    "manifest_from_dict",
    "sample_grasp_directions",
    "sample_target_pose",
    "save_manifest",
]
