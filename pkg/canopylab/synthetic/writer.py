"""
Write synthetic datasets to disk.

A dataset is a training scene (one LiDAR survey, imagery and truth for the
training year) plus a differently seeded inference scene with one epoch per
inference year, and a manifest that runs the whole pipeline over them.
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence, Union

from ..lidar.text_reader import format_xyz_text
from ..manifest import RunManifest, format_manifest
from ..models.svm import TrainConfig
from ..raster.container import write_container, write_mask
from ..raster.grid import Window
from ..utils import config
from ..utils.errors import SceneSpecError
from .scene import SyntheticScene, SyntheticSceneSpec, generate_synthetic_scene

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.ini"


def _write(path: Path, data: Union[bytes, str]) -> Path:
    if isinstance(data, str):
        path.write_text(data, encoding="utf-8")
    else:
        path.write_bytes(data)
    logger.debug(f"Wrote {path}")
    return path


def write_scene_files(
    scene: SyntheticScene, directory: Path, prefix: str, years: Sequence[int]
) -> dict[str, dict[int, Path]]:
    """
    Write a scene's cloud, imagery and truth masks.

    Args:
        scene: Generated scene
        directory: Destination directory (created if missing)
        prefix: File name prefix
        years: One year label per epoch

    Returns:
        {"cloud": {first_year: path}, "image": {...}, "truth": {...}}
    """
    if len(years) != scene.spec.epoch_count:
        raise SceneSpecError(f"{len(years)} year label(s) for {scene.spec.epoch_count} epoch(s)")
    directory.mkdir(parents=True, exist_ok=True)
    files: dict[str, dict[int, Path]] = {"cloud": {}, "image": {}, "truth": {}}
    files["cloud"][years[0]] = _write(
        directory / f"{prefix}_cloud_{years[0]}.xyz", format_xyz_text(scene.cloud)
    )
    for year, image, truth in zip(years, scene.images, scene.truths):
        files["image"][year] = _write(
            directory / f"{prefix}_image_{year}.cnpy", write_container(image)
        )
        files["truth"][year] = _write(directory / f"{prefix}_truth_{year}.mask", write_mask(truth))
    return files


def write_synthetic_dataset(
    directory: Union[str, Path],
    seed: int = config.SVM_SEED,
    spec: Optional[SyntheticSceneSpec] = None,
    train_year: int = config.SYNTH_TRAIN_YEAR,
    years: Sequence[int] = config.SYNTH_YEARS,
    removal_fractions: Sequence[float] = config.SYNTH_REMOVAL_FRACTIONS,
    samples: int = config.SYNTH_TRAIN_SAMPLES,
) -> Path:
    """
    Generate a training and an inference scene and a manifest tying them together.

    Args:
        directory: Destination directory
        seed: Training scene seed; the inference scene adds
            config.SYNTH_INFERENCE_SEED_OFFSET
        spec: Scene parameters apart from seed and removal fractions
        train_year: Year label of the training scene
        years: Year labels of the inference epochs, strictly increasing
        removal_fractions: Tree share removed between consecutive inference epochs
        samples: Training pixels per class written into the manifest

    Returns:
        Path of the manifest

    Raises:
        SceneSpecError: If years and removal fractions disagree
    """
    directory = Path(directory)
    years = list(years)
    if len(removal_fractions) != len(years) - 1:
        raise SceneSpecError(
            f"{len(years)} inference year(s) need {len(years) - 1} removal fraction(s), "
            f"got {len(removal_fractions)}"
        )
    base = spec or SyntheticSceneSpec()
    train_scene = generate_synthetic_scene(replace(base, seed=seed, removal_fractions=()))
    infer_scene = generate_synthetic_scene(
        replace(
            base,
            seed=seed + config.SYNTH_INFERENCE_SEED_OFFSET,
            removal_fractions=tuple(removal_fractions),
        )
    )
    train_files = write_scene_files(train_scene, directory, "train", [train_year])
    infer_files = write_scene_files(infer_scene, directory, "infer", years)

    grid = base.image_grid
    manifest = RunManifest(
        output_dir=directory / "run",
        cloud=train_files["cloud"][train_year],
        train_image=train_files["image"][train_year],
        train_year=train_year,
        predict=infer_files["image"],
        seed=seed,
        cell_size=base.stats_cell_size,
        train=TrainConfig(sample_count=samples, seed=seed),
        truth={**train_files["truth"], **infer_files["truth"]},
        aois={"scene": Window(0, 0, grid.width, grid.height)},
    )
    path = _write(directory / MANIFEST_FILE, format_manifest(manifest, relative_to=directory))
    logger.info(
        f"Wrote synthetic dataset to {directory}: training year {train_year}, "
        f"inference years {years}"
    )
    return path
