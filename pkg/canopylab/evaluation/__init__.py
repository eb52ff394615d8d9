"""Accuracy metrics and change detection."""

from .change import ChangeReport, blend_overlay, change, overlay_png
from .metrics import (
    ConfusionCounts,
    MetricsReport,
    PerformanceRow,
    confusion,
    evaluate_masks,
    metrics,
)

__all__ = [
    "ChangeReport",
    "ConfusionCounts",
    "MetricsReport",
    "PerformanceRow",
    "blend_overlay",
    "change",
    "confusion",
    "evaluate_masks",
    "metrics",
    "overlay_png",
]
