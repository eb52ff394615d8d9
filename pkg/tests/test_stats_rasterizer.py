"""
Unit tests for the sliding-circle statistics rasterizer.

The rasterizer is compared cell by cell against a brute-force scan over all
points, and checked for bit-identical output across thread counts and input
orders.
"""

import numpy as np
import pytest

from canopylab.lidar.pointcloud import LidarPoint, PointCloud
from canopylab.lidar.stats_rasterizer import (
    PSEUDO_RGB_BANDS,
    STATS_BAND_NAMES,
    StatsStack,
    load_stats_stack,
    rasterize_stats,
    stack_grid_for,
    stack_to_pseudo_rgb,
)
from canopylab.raster.container import write_container
from canopylab.raster.grid import GridSpec
from canopylab.raster.layers import MultibandRaster
from canopylab.utils.errors import BandMismatchError, ParameterError
from tests.oracles import brute_force_stats


@pytest.fixture
def oracle_grid():
    """12 x 12 cells of 0.5 m."""
    return GridSpec(0.0, 6.0, 0.5, 12, 12)


@pytest.fixture
def oracle_cloud(rng):
    """300 returns over the oracle grid with a ragged margin."""
    n = 300
    num_returns = rng.integers(1, 5, n)
    return PointCloud(
        x=rng.uniform(-0.5, 6.5, n),
        y=rng.uniform(-0.5, 6.5, n),
        z=rng.normal(10.0, 4.0, n),
        intensity=rng.integers(0, 65536, n),
        return_number=np.minimum(rng.integers(1, 5, n), num_returns),
        num_returns=num_returns,
    )


def assert_bit_identical(a: StatsStack, b: StatsStack):
    assert a.spec == b.spec
    np.testing.assert_array_equal(a.multiband.nodata, b.multiband.nodata)
    assert a.multiband.values.tobytes() == b.multiband.values.tobytes()


class TestAgainstBruteForce:
    """Compare every cell with a direct scan over all points."""

    def test_matches_oracle(self, oracle_cloud, oracle_grid):
        """Every band of every cell should match the brute-force statistics."""
        stack = rasterize_stats(oracle_cloud, oracle_grid, radius=0.75, threads=1)
        expected = brute_force_stats(oracle_cloud.points, oracle_grid, 0.75)

        for (row, col), cell in expected.items():
            for b, name in enumerate(STATS_BAND_NAMES):
                nodata = stack.multiband.nodata[b, row, col]
                value = stack.multiband.values[b, row, col]
                if cell is None:
                    assert nodata == (name != "count")
                    if name == "count":
                        assert value == 0
                else:
                    assert not nodata
                    assert value == pytest.approx(cell[name], rel=1e-9, abs=1e-6)

    def test_larger_radius_matches_oracle(self, oracle_cloud, oracle_grid):
        """Overlapping neighbourhoods should also agree with the scan."""
        stack = rasterize_stats(oracle_cloud, oracle_grid, radius=1.6, threads=3)
        expected = brute_force_stats(oracle_cloud.points, oracle_grid, 1.6)

        for (row, col), cell in expected.items():
            assert stack.count[row, col] == (0 if cell is None else cell["count"])
            if cell is not None:
                std = stack.band("elevation.std").values[row, col]
                assert std == pytest.approx(cell["elevation.std"], rel=1e-9, abs=1e-6)


class TestDeterminism:
    """Output must not depend on threads or point order."""

    def test_thread_counts_are_bit_identical(self, random_cloud, small_grid):
        """1, 2 and 8 workers should give identical bytes."""
        stacks = [rasterize_stats(random_cloud, small_grid, 0.75, threads=t) for t in (1, 2, 8)]

        assert_bit_identical(stacks[0], stacks[1])
        assert_bit_identical(stacks[0], stacks[2])

    def test_point_order_is_irrelevant(self, random_cloud, small_grid, rng):
        """A permuted cloud should give identical bytes."""
        shuffled = random_cloud.take(rng.permutation(len(random_cloud)))

        assert_bit_identical(
            rasterize_stats(random_cloud, small_grid, 0.75, threads=1),
            rasterize_stats(shuffled, small_grid, 0.75, threads=4),
        )

    @pytest.mark.parametrize("dx,dy", [(1024.0, 2048.0), (-512.0, 256.0)])
    def test_translation_leaves_bands_unchanged(self, random_cloud, small_grid, dx, dy):
        """Shifting the cloud and the grid by one offset keeps every band."""
        moved_grid = GridSpec(
            small_grid.origin_x + dx,
            small_grid.origin_y + dy,
            small_grid.cell_size,
            small_grid.width,
            small_grid.height,
        )

        before = rasterize_stats(random_cloud, small_grid, 0.75, threads=1)
        after = rasterize_stats(random_cloud.translated(dx, dy), moved_grid, 0.75, threads=1)

        np.testing.assert_array_equal(before.multiband.nodata, after.multiband.nodata)
        np.testing.assert_array_equal(before.multiband.values, after.multiband.values)
        assert after.names == STATS_BAND_NAMES


class TestCellStatistics:
    """Test individual cell behaviour."""

    def test_point_on_circle_boundary_counts(self):
        """The neighbourhood is a closed disk."""
        grid = GridSpec(0.0, 0.5, 0.5, 1, 1)
        center_x, center_y = 0.25, 0.25
        cloud = PointCloud.from_points(
            [
                LidarPoint(center_x + 0.75, center_y, 1.0),
                LidarPoint(center_x, center_y - 0.75, 2.0),
                LidarPoint(center_x + 0.7500001, center_y, 3.0),
            ]
        )

        stack = rasterize_stats(cloud, grid, radius=0.75)

        assert stack.count[0, 0] == 2
        assert stack.band("elevation.max").values[0, 0] == 2.0

    def test_single_point_statistics(self):
        """One point gives min = max = mean and zero spread."""
        grid = GridSpec(0.0, 1.0, 1.0, 1, 1)
        cloud = PointCloud.from_points([LidarPoint(0.5, 0.5, 7.25, 900, 2, 3)])

        stack = rasterize_stats(cloud, grid, radius=0.5)

        for quantity, value in (("elevation", 7.25), ("num_returns", 3.0), ("intensity", 900.0)):
            for statistic in ("min", "max", "mean"):
                assert stack.band(f"{quantity}.{statistic}").values[0, 0] == value
            assert stack.band(f"{quantity}.std").values[0, 0] == 0.0

    def test_mean_lies_between_min_and_max(self, random_cloud, small_grid):
        """Mean should never leave [min, max], even with rounding."""
        stack = rasterize_stats(random_cloud, small_grid, 1.0)

        for quantity in ("elevation", "num_returns", "intensity"):
            low = stack.band(f"{quantity}.min").values
            high = stack.band(f"{quantity}.max").values
            mean = stack.band(f"{quantity}.mean").values
            assert np.all((low <= mean) & (mean <= high))

    def test_empty_cloud(self, small_grid):
        """An empty cloud leaves every statistic nodata and every count zero."""
        stack = rasterize_stats(PointCloud.empty(), small_grid)

        assert stack.multiband.nodata[:-1].all()
        assert not stack.multiband.nodata[-1].any()
        assert stack.count.sum() == 0

    @pytest.mark.parametrize("radius", [0.0, -1.0, float("nan"), float("inf")])
    def test_invalid_radius(self, random_cloud, small_grid, radius):
        """The radius must be a positive finite number."""
        with pytest.raises(ParameterError):
            rasterize_stats(random_cloud, small_grid, radius)


class TestStatsStack:
    """Test the stack wrapper and helpers."""

    def test_band_names(self):
        """Thirteen bands: four statistics of three quantities plus the count."""
        assert len(STATS_BAND_NAMES) == 13
        assert STATS_BAND_NAMES[0] == "elevation.min"
        assert STATS_BAND_NAMES[-1] == "count"

    def test_rejects_wrong_bands(self, small_grid):
        """A raster with other bands is not a statistics stack."""
        raster = MultibandRaster(small_grid, ("a",), np.zeros((1,) + small_grid.shape))

        with pytest.raises(BandMismatchError):
            StatsStack(raster)

    def test_from_multiband_reorders(self, random_cloud, small_grid):
        """Bands in any order should be put into canonical order."""
        stack = rasterize_stats(random_cloud, small_grid)
        reversed_bands = stack.multiband.select(tuple(reversed(STATS_BAND_NAMES)))

        again = StatsStack.from_multiband(reversed_bands)

        assert again.names == STATS_BAND_NAMES

    def test_load_saved_stack(self, random_cloud, small_grid, tmp_path):
        """A saved stack should load back with the same grid and count."""
        stack = rasterize_stats(random_cloud, small_grid)
        path = tmp_path / "stats.cnpy"
        path.write_bytes(write_container(stack.multiband))

        loaded = load_stats_stack(path)

        assert loaded.spec == small_grid
        assert loaded.radius is None
        np.testing.assert_array_equal(loaded.count, stack.count)

    def test_grid_covering_imagery(self, image_grid):
        """A 0.5 m grid over 8 x 6 m of imagery should be 16 x 12 cells."""
        grid = stack_grid_for(image_grid, 0.5)

        assert (grid.origin_x, grid.origin_y) == (image_grid.origin_x, image_grid.origin_y)
        assert grid.shape == (12, 16)
        assert grid.bounds == image_grid.bounds

    def test_pseudo_rgb(self, random_cloud, small_grid):
        """The preview composite should hold the three preview bands."""
        rgb = stack_to_pseudo_rgb(rasterize_stats(random_cloud, small_grid))

        assert rgb.names == PSEUDO_RGB_BANDS
