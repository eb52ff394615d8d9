"""
Sliding-circle statistics rasterizer.

For every cell the neighbourhood is the closed disk of the given radius
around the cell center. Minimum, maximum, mean and population standard
deviation of elevation, number of returns and intensity are accumulated over
the points inside it, together with the point count. Cells without points are
nodata in the twelve statistics bands; the count band is valid everywhere.

Points are put into a canonical order before accumulation and each cell sums
its points in that order, so the output is bit-identical for any input order
and any number of worker threads.
"""

import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from ..raster.files import load_raster
from ..raster.grid import GridSpec, cell_centers
from ..raster.layers import MultibandRaster, Raster
from ..utils import config
from ..utils.errors import BandMismatchError, ParameterError
from ..utils.parallel import map_row_bands
from .pointcloud import PointCloud

logger = logging.getLogger(__name__)

STATS_BAND_NAMES: tuple[str, ...] = tuple(
    f"{quantity}.{statistic}"
    for quantity in config.STATS_QUANTITIES
    for statistic in config.STATS_STATISTICS
) + (config.COUNT_BAND,)

PSEUDO_RGB_BANDS: tuple[str, str, str] = ("elevation.mean", "num_returns.max", "intensity.std")

# query radius slack so the exact disk test below never misses a boundary point
_QUERY_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class StatsStack:
    """
    Rasterized LiDAR statistics.

    Attributes:
        multiband: The 13 bands named by STATS_BAND_NAMES, in that order
        radius: Neighbourhood radius in meters, None when unknown (loaded files)
    """

    multiband: MultibandRaster
    radius: Optional[float] = None

    def __post_init__(self) -> None:
        if self.multiband.names != STATS_BAND_NAMES:
            raise BandMismatchError(
                f"a statistics stack needs bands {list(STATS_BAND_NAMES)}, "
                f"got {list(self.multiband.names)}"
            )

    @classmethod
    def from_multiband(
        cls, multiband: MultibandRaster, radius: Optional[float] = None
    ) -> "StatsStack":
        """Wrap a multiband raster, reordering bands into canonical order."""
        return cls(multiband.require_bands(STATS_BAND_NAMES), radius)

    @property
    def spec(self) -> GridSpec:
        return self.multiband.spec

    @property
    def names(self) -> tuple[str, ...]:
        return self.multiband.names

    def band(self, name: str) -> Raster:
        return self.multiband.band(name)

    @property
    def count(self) -> np.ndarray:
        """Points per neighbourhood as integers."""
        return self.multiband.values[STATS_BAND_NAMES.index(config.COUNT_BAND)].astype(np.int64)


def _canonical_columns(cloud: PointCloud) -> dict[str, np.ndarray]:
    """Point columns sorted lexicographically by x, y, z, intensity, returns."""
    order = np.lexsort(
        (cloud.num_returns, cloud.return_number, cloud.intensity, cloud.z, cloud.y, cloud.x)
    )
    return {
        "x": cloud.x[order],
        "y": cloud.y[order],
        "elevation": cloud.z[order],
        "num_returns": cloud.num_returns[order].astype(np.float64),
        "intensity": cloud.intensity[order].astype(np.float64),
    }


def _band_pairs(
    tree: cKDTree,
    columns: dict[str, np.ndarray],
    spec: GridSpec,
    radius: float,
    start: int,
    stop: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    (cell, point) pairs for the cells in rows start..stop.

    Returns:
        Local cell ids and point indices, ordered by cell then point index
    """
    xs, ys = cell_centers(spec, start, stop)
    cx, cy = xs.ravel(), ys.ravel()
    hits = tree.query_ball_point(
        np.column_stack([cx, cy]), radius * (1.0 + _QUERY_SLACK), return_sorted=True
    )
    lengths = np.fromiter((len(h) for h in hits), dtype=np.int64, count=len(hits))
    if lengths.sum() == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    points = np.concatenate([np.asarray(h, dtype=np.int64) for h in hits if h])
    cells = np.repeat(np.arange(len(hits), dtype=np.int64), lengths)
    dx = columns["x"][points] - cx[cells]
    dy = columns["y"][points] - cy[cells]
    inside = dx * dx + dy * dy <= radius * radius
    return cells[inside], points[inside]


def _band_statistics(
    tree: Optional[cKDTree],
    columns: dict[str, np.ndarray],
    spec: GridSpec,
    radius: float,
    start: int,
    stop: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Statistics for one row band.

    Returns:
        (values, nodata), shaped (13, stop - start, width)
    """
    rows = stop - start
    n_cells = rows * spec.width
    values = np.zeros((len(STATS_BAND_NAMES), n_cells), dtype=np.float64)
    nodata = np.ones((len(STATS_BAND_NAMES), n_cells), dtype=bool)
    nodata[-1] = False

    if tree is not None:
        cells, points = _band_pairs(tree, columns, spec, radius, start, stop)
    else:
        cells = points = np.empty(0, dtype=np.int64)

    count = np.bincount(cells, minlength=n_cells)
    filled = count > 0
    values[-1] = count
    if cells.size:
        # pairs are grouped by cell, so each non-empty cell is one segment
        segment_starts = np.flatnonzero(np.r_[True, cells[1:] != cells[:-1]])
        for q, quantity in enumerate(config.STATS_QUANTITIES):
            samples = columns[quantity][points]
            sums = np.bincount(cells, weights=samples, minlength=n_cells)
            mean = np.zeros(n_cells)
            mean[filled] = sums[filled] / count[filled]
            deviation = samples - mean[cells]
            variance = np.zeros(n_cells)
            variance[filled] = (
                np.bincount(cells, weights=deviation * deviation, minlength=n_cells)[filled]
                / count[filled]
            )
            low = np.zeros(n_cells)
            high = np.zeros(n_cells)
            low[filled] = np.minimum.reduceat(samples, segment_starts)
            high[filled] = np.maximum.reduceat(samples, segment_starts)
            base = q * len(config.STATS_STATISTICS)
            values[base + 0] = low
            values[base + 1] = high
            values[base + 2] = np.clip(mean, low, high)
            values[base + 3] = np.sqrt(variance)
            nodata[base:base + 4] = ~filled
    return values.reshape(-1, rows, spec.width), nodata.reshape(-1, rows, spec.width)


def rasterize_stats(
    cloud: PointCloud,
    spec: GridSpec,
    radius: Optional[float] = None,
    threads: Optional[int] = None,
) -> StatsStack:
    """
    Rasterize a point cloud into the statistics stack.

    Args:
        cloud: Input returns (may be empty)
        spec: Output grid
        radius: Neighbourhood radius in meters (default config.STATS_RADIUS)
        threads: Worker count (None = config, 0 = auto)

    Returns:
        StatsStack on spec

    Raises:
        ParameterError: If radius is not a positive finite number
    """
    if radius is None:
        radius = config.STATS_RADIUS
    if not (math.isfinite(radius) and radius > 0):
        raise ParameterError(f"radius must be positive, got {radius}")

    started = time.perf_counter()
    columns = _canonical_columns(cloud)
    tree = cKDTree(np.column_stack([columns["x"], columns["y"]])) if len(cloud) else None

    bands = map_row_bands(
        lambda start, stop: _band_statistics(tree, columns, spec, radius, start, stop),
        spec.height,
        threads,
    )
    values = np.concatenate([band[0] for band in bands], axis=1)
    nodata = np.concatenate([band[1] for band in bands], axis=1)
    stack = StatsStack(MultibandRaster(spec, STATS_BAND_NAMES, values, nodata), float(radius))

    logger.info(
        f"Rasterized {len(cloud)} points onto {spec.width}x{spec.height} cells "
        f"(radius {radius} m, {int(np.count_nonzero(stack.count))} cells filled) "
        f"in {time.perf_counter() - started:.2f}s"
    )
    return stack


def stack_to_pseudo_rgb(stack: StatsStack) -> MultibandRaster:
    """
    Pseudo-color composite: R mean elevation, G max returns, B intensity std.

    Args:
        stack: Statistics stack

    Returns:
        3-band raster ready for PNG export
    """
    return stack.multiband.select(PSEUDO_RGB_BANDS)


def stack_grid_for(extent: GridSpec, cell_size: Optional[float] = None) -> GridSpec:
    """
    Statistics grid covering another grid's extent.

    Args:
        extent: Grid whose extent to cover (usually the training imagery)
        cell_size: Statistics cell size (default config.STATS_CELL_SIZE)

    Returns:
        Grid sharing extent's top-left corner
    """
    cell_size = config.STATS_CELL_SIZE if cell_size is None else cell_size
    if not (math.isfinite(cell_size) and cell_size > 0):
        raise ParameterError(f"cell_size must be positive, got {cell_size}")
    bounds = extent.bounds
    return GridSpec(
        extent.origin_x,
        extent.origin_y,
        cell_size,
        max(1, math.ceil(round(bounds.width / cell_size, 9))),
        max(1, math.ceil(round(bounds.height / cell_size, 9))),
    )


def load_stats_stack(path: Union[str, Path]) -> StatsStack:
    """
    Read a statistics stack saved as a container.

    Raises:
        BandMismatchError: If the container lacks one of the 13 bands
    """
    stack = StatsStack.from_multiband(load_raster(path))
    logger.info(f"Loaded statistics stack {path} ({stack.spec.width}x{stack.spec.height})")
    return stack
