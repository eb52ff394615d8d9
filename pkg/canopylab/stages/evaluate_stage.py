"""
Evaluate stage: score labels and predictions against exact labels.

Rows of the performance table:
    noisy labels vs. exact labels of the training year
    each model's prediction vs. exact labels of each inference year
"""

import logging

from ..evaluation.metrics import PerformanceRow, evaluate_masks
from .base_stage import BaseStage
from .train_stage import NOISY

logger = logging.getLogger(__name__)


class EvaluateStage(BaseStage):
    """Builds the performance table."""

    name = "evaluate"

    def should_run(self) -> bool:
        manifest = self.pipeline.manifest
        return manifest.train_year in manifest.truth or any(
            year in manifest.truth for year in manifest.years
        )

    def run(self) -> None:
        manifest = self.pipeline.manifest
        rows: list[PerformanceRow] = []

        image_grid = self.context.train_image.spec
        exact = self.pipeline.truth_mask(manifest.train_year, image_grid)
        if exact is not None:
            report = evaluate_masks(self.context.training_labels, exact)
            rows.append(PerformanceRow(f"{NOISY} labels", f"exact {manifest.train_year}", report))

        for year in manifest.years:
            truth = self.pipeline.truth_mask(year, self.context.reference_grid)
            if truth is None:
                continue
            for model_name, predictions in self.context.predictions.items():
                report = evaluate_masks(predictions[year], truth)
                rows.append(PerformanceRow(f"svm ({model_name} labels)", f"exact {year}", report))

        for row in rows:
            p, r, f1, iou = row.report.rounded()
            logger.info(f"{row.model:>24} vs {row.labels}: P {p} R {r} F1 {f1} IoU {iou}")
        self.context.performance = rows
        self.write_json("metrics.json", [row.as_dict() for row in rows], "metrics")
