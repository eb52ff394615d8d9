"""
Unit tests for segmentation accuracy metrics.
"""

import math

import numpy as np
import pytest

from canopylab.evaluation.metrics import (
    ConfusionCounts,
    MetricsReport,
    PerformanceRow,
    confusion,
    evaluate_masks,
    metrics,
)
from canopylab.raster.grid import GridSpec
from canopylab.raster.layers import BinaryMask
from canopylab.utils.errors import GridMismatchError, ParameterError


def random_mask(grid, rng, invalid_fraction=0.1):
    valid = rng.random(grid.shape) >= invalid_fraction
    return BinaryMask(grid, rng.random(grid.shape) < 0.4, valid)


class TestConfusion:
    """Test confusion counting."""

    def test_counts_on_a_small_example(self, make_mask):
        """Each cell lands in exactly one of the four counts."""
        grid = GridSpec(0.0, 2.0, 1.0, 4, 2)
        pred = make_mask(grid, [[1, 1, 0, 0], [1, 0, None, 1]])
        truth = make_mask(grid, [[1, 0, 1, 0], [0, 0, 1, None]])

        counts = confusion(pred, truth)

        assert counts == ConfusionCounts(tp=1, fp=2, fn=1, tn=2)

    def test_only_jointly_valid_cells_count(self, small_grid, rng):
        """Cells invalid in either mask are excluded."""
        pred = random_mask(small_grid, rng, 0.2)
        truth = random_mask(small_grid, rng, 0.2)

        counts = confusion(pred, truth)

        assert counts.total == int(np.count_nonzero(pred.valid & truth.valid))

    def test_swapping_masks_swaps_errors(self, small_grid, rng):
        """Exchanging prediction and truth exchanges fp and fn."""
        a = random_mask(small_grid, rng)
        b = random_mask(small_grid, rng)

        assert confusion(b, a) == confusion(a, b).swapped()

    def test_grid_mismatch(self, small_grid, image_grid):
        """Masks on different grids cannot be compared."""
        a = BinaryMask(small_grid, np.zeros(small_grid.shape, bool))
        b = BinaryMask(image_grid, np.zeros(image_grid.shape, bool))

        with pytest.raises(GridMismatchError):
            confusion(a, b)

    def test_negative_counts_rejected(self):
        """Counts are non-negative integers."""
        with pytest.raises(ParameterError):
            ConfusionCounts(1, -1, 0, 0)


class TestMetrics:
    """Test the ratios derived from counts."""

    def test_reference_row(self):
        """tp=312, fp=288, fn=208 gives precision .52, recall .60, F1 .557, IoU .386."""
        report = metrics(ConfusionCounts(tp=312, fp=288, fn=208, tn=0))

        assert report.precision == pytest.approx(0.52)
        assert report.recall == pytest.approx(0.60)
        assert report.f1 == pytest.approx(624 / 1120)
        assert report.iou == pytest.approx(312 / 808)
        truncated = tuple(math.floor(v * 100) / 100 for v in report.rounded(6))
        assert truncated == (0.52, 0.60, 0.55, 0.38)

    def test_identities(self, rng):
        """2/F1 = 1/p + 1/r and IoU = F1 / (2 - F1) wherever defined."""
        for _ in range(1000):
            tp, fp, fn, tn = (int(v) for v in rng.integers(0, 500, 4))
            report = metrics(ConfusionCounts(tp, fp, fn, tn))
            if tp == 0:
                continue
            harmonic = 1 / report.precision + 1 / report.recall
            assert 2 / report.f1 == pytest.approx(harmonic, abs=1e-12)
            assert report.iou == pytest.approx(report.f1 / (2 - report.f1), abs=1e-12)

    def test_undefined_ratios_are_zero(self):
        """0/0 is reported as 0 rather than NaN."""
        report = metrics(ConfusionCounts(0, 0, 0, 10))

        assert (report.precision, report.recall, report.f1, report.iou) == (0.0, 0.0, 0.0, 0.0)

    def test_identical_masks_score_perfectly(self, small_grid, rng):
        """A mask compared with itself has every ratio at 1."""
        mask = random_mask(small_grid, rng)

        report = evaluate_masks(mask, mask)

        assert report.rounded() == (1.0, 1.0, 1.0, 1.0)
        assert report.counts.fp == report.counts.fn == 0

    def test_report_dictionary(self):
        """The flat dictionary holds the ratios and the counts."""
        report = metrics(ConfusionCounts(3, 1, 2, 4))

        assert report.as_dict() == {
            "precision": 0.75,
            "recall": 0.6,
            "f1": 6 / 9,
            "iou": 0.5,
            "tp": 3,
            "fp": 1,
            "fn": 2,
            "tn": 4,
        }

    def test_report_without_counts(self):
        """A bare report has only the four ratios."""
        assert set(MetricsReport(1.0, 1.0, 1.0, 1.0).as_dict()) == {
            "precision",
            "recall",
            "f1",
            "iou",
        }

    def test_performance_row(self):
        """Rows name the model and the label set they were scored against."""
        row = PerformanceRow("svm_noisy", "exact", metrics(ConfusionCounts(1, 0, 0, 1)))

        result = row.as_dict()

        assert result["model"] == "svm_noisy"
        assert result["labels"] == "exact"
        assert result["f1"] == 1.0
