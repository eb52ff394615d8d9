"""Synthetic scenes for end-to-end checks."""

from .scene import (
    CLASS_NAMES,
    Building,
    SyntheticScene,
    SyntheticSceneSpec,
    TreeCluster,
    generate_synthetic_scene,
)
from .writer import MANIFEST_FILE, write_scene_files, write_synthetic_dataset

__all__ = [
    "CLASS_NAMES",
    "Building",
    "MANIFEST_FILE",
    "SyntheticScene",
    "SyntheticSceneSpec",
    "TreeCluster",
    "generate_synthetic_scene",
    "write_scene_files",
    "write_synthetic_dataset",
]
