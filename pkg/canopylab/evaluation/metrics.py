"""
Binary segmentation accuracy.

Counts are taken over cells valid in both masks. Ratios whose denominator is
zero are reported as 0 so reports stay total and sortable.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ..raster.layers import BinaryMask
from ..utils.errors import GridMismatchError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfusionCounts:
    """Pixel counts of a tree / non-tree comparison."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn", "tn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ParameterError(f"{name} must be a non-negative integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionCounts":
        """Counts with prediction and truth exchanged."""
        return ConfusionCounts(self.tp, self.fn, self.fp, self.tn)

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class MetricsReport:
    """
    Precision, recall, F1 and IoU of the tree class.

    Attributes:
        precision: tp / (tp + fp)
        recall: tp / (tp + fn)
        f1: 2 tp / (2 tp + fp + fn)
        iou: tp / (tp + fp + fn)
        counts: The counts the ratios were computed from
    """

    precision: float
    recall: float
    f1: float
    iou: float
    counts: Optional[ConfusionCounts] = None

    def as_dict(self) -> dict:
        """Flat dictionary of the four metrics and the four counts."""
        result = {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "iou": self.iou,
        }
        if self.counts is not None:
            result.update(self.counts.as_dict())
        return result

    def rounded(self, digits: int = 2) -> tuple[float, float, float, float]:
        """(precision, recall, f1, iou) rounded for display."""
        return tuple(round(v, digits) for v in (self.precision, self.recall, self.f1, self.iou))


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def confusion(pred: BinaryMask, truth: BinaryMask) -> ConfusionCounts:
    """
    Count agreement between a prediction and a reference mask.

    Args:
        pred: Predicted mask
        truth: Reference mask on the same grid

    Returns:
        Counts over cells valid in both masks

    Raises:
        GridMismatchError: If the masks are on different grids
    """
    if pred.spec != truth.spec:
        raise GridMismatchError(
            f"prediction grid {pred.spec} differs from truth grid {truth.spec}; resample first"
        )
    joint = pred.valid & truth.valid
    p = pred.bits & joint
    t = truth.bits & joint
    return ConfusionCounts(
        tp=int(np.count_nonzero(p & t)),
        fp=int(np.count_nonzero(p & ~t & joint)),
        fn=int(np.count_nonzero(~p & t & joint)),
        tn=int(np.count_nonzero(~p & ~t & joint)),
    )


def metrics(counts: ConfusionCounts) -> MetricsReport:
    """
    Accuracy ratios from confusion counts; 0/0 yields 0.

    Args:
        counts: Confusion counts

    Returns:
        MetricsReport carrying the counts
    """
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    return MetricsReport(
        precision=_ratio(tp, tp + fp),
        recall=_ratio(tp, tp + fn),
        f1=_ratio(2 * tp, 2 * tp + fp + fn),
        iou=_ratio(tp, tp + fp + fn),
        counts=counts,
    )


def evaluate_masks(pred: BinaryMask, truth: BinaryMask) -> MetricsReport:
    """confusion() followed by metrics()."""
    report = metrics(confusion(pred, truth))
    logger.info(
        f"Evaluated {report.counts.total} cells: precision {report.precision:.3f}, "
        f"recall {report.recall:.3f}, F1 {report.f1:.3f}, IoU {report.iou:.3f}"
    )
    return report


@dataclass(frozen=True)
class PerformanceRow:
    """One row of a performance table: a model scored against a label set."""

    model: str
    labels: str
    report: MetricsReport

    def as_dict(self) -> dict:
        return {"model": self.model, "labels": self.labels, **self.report.as_dict()}
