"""
Training sample extraction.

Pixels are drawn uniformly without replacement from each class of a mask
(equal counts per class) and turned into feature vectors of the four image
bands divided by 255.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..raster.layers import BinaryMask, MultibandRaster
from ..utils import config
from ..utils.errors import GridMismatchError, InsufficientClassError, ParameterError

logger = logging.getLogger(__name__)

TREE_LABEL = 1
NON_TREE_LABEL = -1


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    Labelled feature vectors.

    Attributes:
        features: float64 array (N, bands), scaled to [0, 1] for imagery
        labels: int8 array (N,) of +1 (tree) and -1 (non-tree)
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        features = np.array(self.features, dtype=np.float64, copy=True)
        labels = np.array(self.labels, dtype=np.int8, copy=True).reshape(-1)
        if features.ndim != 2 or features.shape[0] != labels.shape[0]:
            raise ParameterError(
                f"features {features.shape} and labels {labels.shape} do not match"
            )
        if not np.all((labels == TREE_LABEL) | (labels == NON_TREE_LABEL)):
            raise ParameterError("labels must be +1 or -1")
        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dimension(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        """(tree samples, non-tree samples)."""
        positives = int(np.count_nonzero(self.labels == TREE_LABEL))
        return positives, len(self) - positives


def image_features(
    image: MultibandRaster, bands: Optional[Sequence[str]] = None
) -> np.ndarray:
    """
    Per-pixel feature vectors of an image.

    Args:
        image: Imagery holding the requested bands
        bands: Band order of the features (default config.IMAGE_BANDS)

    Returns:
        float64 array (height, width, bands) of band values / 255
    """
    selected = image.require_bands(tuple(bands or config.IMAGE_BANDS))
    return np.moveaxis(selected.values, 0, -1) / config.FEATURE_SCALE


def extract_training_samples(
    image: MultibandRaster,
    mask: BinaryMask,
    per_class: Optional[int] = None,
    seed: Optional[int] = None,
    bands: Optional[Sequence[str]] = None,
) -> SampleSet:
    """
    Draw balanced training pixels from an image and a label mask.

    Args:
        image: Four-band imagery
        mask: Tree / non-tree labels on the image grid
        per_class: Pixels per class (default config.SVM_SAMPLES_PER_CLASS);
            all of a class when it has fewer
        seed: Random seed (default config.SVM_SEED)
        bands: Feature band order (default config.IMAGE_BANDS)

    Returns:
        SampleSet with the tree samples first, each class in raster order

    Raises:
        GridMismatchError: Image and mask are on different grids
        InsufficientClassError: A class has no usable pixel
    """
    per_class = config.SVM_SAMPLES_PER_CLASS if per_class is None else per_class
    seed = config.SVM_SEED if seed is None else seed
    if per_class < 1:
        raise ParameterError(f"per_class must be at least 1, got {per_class}")
    if image.spec != mask.spec:
        raise GridMismatchError(
            f"image grid {image.spec} differs from mask grid {mask.spec}; resample first"
        )

    band_names = tuple(bands or config.IMAGE_BANDS)
    features = image_features(image, band_names).reshape(-1, len(band_names))
    usable = ~image.require_bands(band_names).pixel_nodata.ravel()
    rng = np.random.default_rng(seed)

    chosen, labels = [], []
    for name, cells, label in (
        ("tree", mask.tree.ravel() & usable, TREE_LABEL),
        ("non-tree", mask.non_tree.ravel() & usable, NON_TREE_LABEL),
    ):
        candidates = np.flatnonzero(cells)
        if candidates.size == 0:
            raise InsufficientClassError(f"mask has no valid {name} pixel to sample")
        if candidates.size > per_class:
            candidates = np.sort(rng.choice(candidates, size=per_class, replace=False))
        chosen.append(candidates)
        labels.append(np.full(candidates.size, label, dtype=np.int8))
        logger.debug(f"Sampled {candidates.size} {name} pixels")

    index = np.concatenate(chosen)
    samples = SampleSet(features[index], np.concatenate(labels))
    logger.info(f"Extracted {len(samples)} training samples {samples.class_counts()}")
    return samples
