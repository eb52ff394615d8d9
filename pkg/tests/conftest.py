"""
Pytest configuration and fixtures.

Common test fixtures for the canopylab test suite.
"""

import numpy as np
import pytest

from canopylab.lidar.pointcloud import PointCloud
from canopylab.raster.grid import GridSpec
from canopylab.raster.layers import BinaryMask, MultibandRaster
from canopylab.utils import config


@pytest.fixture(autouse=True)
def restore_config():
    """Undo CLI overrides of module-level settings after every test."""
    threads, verbose = config.THREADS, config.VERBOSE
    yield
    config.THREADS, config.VERBOSE = threads, verbose


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid():
    """20 x 20 cells of 0.5 m with the top-left corner at (0, 10)."""
    return GridSpec(0.0, 10.0, 0.5, 20, 20)


@pytest.fixture
def random_cloud(rng):
    """1000 random returns over the small grid's extent."""
    n = 1000
    num_returns = rng.integers(1, 5, n)
    return PointCloud(
        x=rng.uniform(-0.5, 10.5, n),
        y=rng.uniform(-0.5, 10.5, n),
        z=rng.uniform(0.0, 20.0, n),
        intensity=rng.integers(0, 65536, n),
        return_number=np.minimum(rng.integers(1, 5, n), num_returns),
        num_returns=num_returns,
        source_description="random test cloud",
    )


@pytest.fixture
def image_grid():
    """8 x 6 cells of 1 m."""
    return GridSpec(100.0, 200.0, 1.0, 8, 6)


@pytest.fixture
def make_image():
    """Factory for four-band imagery filled from a per-pixel class map."""

    def _make(grid, tree, tree_color=(170, 60, 95, 60), other_color=(100, 130, 120, 105)):
        tree = np.asarray(tree, dtype=bool)
        values = np.where(
            tree[None], np.array(tree_color)[:, None, None], np.array(other_color)[:, None, None]
        )
        return MultibandRaster(grid, config.IMAGE_BANDS, values.astype(np.float64))

    return _make


@pytest.fixture
def make_mask():
    """Factory for masks from nested lists (1 tree, 0 non-tree, None invalid)."""

    def _make(grid, rows):
        bits = np.array([[v == 1 for v in row] for row in rows], dtype=bool)
        valid = np.array([[v is not None for v in row] for row in rows], dtype=bool)
        return BinaryMask(grid, bits, valid)

    return _make
