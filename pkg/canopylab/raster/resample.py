"""
Nearest-neighbour resampling between grids.

Each target cell takes the value of the source cell containing the target
cell's center. Target cells whose center falls outside the source, or over
source nodata, become nodata.
"""

import logging
from typing import TypeVar, Union

import numpy as np

from ..utils.errors import NoOverlapError
from .grid import GridSpec, cell_centers, cells_of
from .layers import BinaryMask, CategoricalRaster, MultibandRaster, Raster

logger = logging.getLogger(__name__)

Layer = TypeVar("Layer", Raster, MultibandRaster, BinaryMask, CategoricalRaster)


def _lookup(src: GridSpec, target: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Source (row, col) for every target center, plus an inside flag."""
    if not src.overlaps(target):
        raise NoOverlapError(
            f"source extent {src.bounds} and target extent {target.bounds} are disjoint"
        )
    xs, ys = cell_centers(target)
    return cells_of(src, xs, ys)


def resample_nearest(
    src: Union[Raster, MultibandRaster, BinaryMask, CategoricalRaster],
    target: GridSpec,
) -> Union[Raster, MultibandRaster, BinaryMask, CategoricalRaster]:
    """
    Resample a layer onto another grid by nearest neighbour.

    Args:
        src: Raster, MultibandRaster, BinaryMask or CategoricalRaster
        target: Grid to resample onto

    Returns:
        A layer of the same kind on the target grid

    Raises:
        NoOverlapError: If the grids are spatially disjoint
    """
    if src.spec == target:
        return src

    rows, cols, inside = _lookup(src.spec, target)
    logger.debug(
        f"Resampling {type(src).__name__} {src.spec.shape} -> {target.shape}, "
        f"{int(inside.sum())} target cells covered"
    )

    if isinstance(src, Raster):
        values = np.where(inside, src.values[rows, cols], 0.0)
        nodata = ~inside | src.nodata[rows, cols]
        return Raster(target, np.where(nodata, 0.0, values), nodata)

    if isinstance(src, MultibandRaster):
        values = np.where(inside, src.values[:, rows, cols], 0.0)
        nodata = ~inside | src.nodata[:, rows, cols]
        return MultibandRaster(target, src.names, np.where(nodata, 0.0, values), nodata)

    if isinstance(src, BinaryMask):
        valid = inside & src.valid[rows, cols]
        return BinaryMask(target, src.bits[rows, cols] & valid, valid)

    if isinstance(src, CategoricalRaster):
        classes = np.where(inside, src.classes[rows, cols], src.nodata_id)
        return CategoricalRaster(target, classes, src.class_names, src.nodata_id)

    raise TypeError(f"cannot resample {type(src).__name__}")
