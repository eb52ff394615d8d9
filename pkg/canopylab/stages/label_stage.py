"""Label stage: the rule turns the statistics stack into noisy tree labels."""

import logging

from ..labels.evaluator import evaluate_rule
from ..labels.rules import format_rule, parse_rule
from ..raster.container import write_mask
from ..raster.png import export_png
from ..raster.resample import resample_nearest
from .base_stage import BaseStage

logger = logging.getLogger(__name__)


class LabelStage(BaseStage):
    """Produces the noisy mask and its copy on the training image grid."""

    name = "label"

    def run(self) -> None:
        rule = parse_rule(self.pipeline.manifest.rule)
        noisy = evaluate_rule(rule, self.context.stack)
        self.context.noisy_mask = noisy
        # the SVM learns per image pixel, so labels move onto the image grid
        self.context.training_labels = resample_nearest(noisy, self.context.train_image.spec)

        self.write("rule.txt", format_rule(rule) + "\n", "rule")
        self.write("noisy_labels.mask", write_mask(noisy), "mask")
        self.write("noisy_labels.png", export_png(noisy), "preview")
        logger.info(
            f"Noisy labels: {noisy.tree_count()} tree cells, "
            f"{self.context.training_labels.tree_count()} tree pixels on the image grid"
        )
