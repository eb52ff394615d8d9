"""
Train stage: fit the SVM on the noisy labels.

When exact labels exist for the training year a second model is trained on
them for comparison.
"""

import logging

from ..models.model_io import save_model
from ..models.samples import extract_training_samples
from ..models.svm import accuracy, train_svm
from .base_stage import BaseStage

logger = logging.getLogger(__name__)

NOISY = "noisy"
EXACT = "exact"


class TrainStage(BaseStage):
    """Produces one model per available label set."""

    name = "train"

    def run(self) -> None:
        manifest = self.pipeline.manifest
        image = self.context.train_image
        label_sets = {NOISY: self.context.training_labels}
        exact = self.pipeline.truth_mask(manifest.train_year, image.spec)
        if exact is not None:
            label_sets[EXACT] = exact

        report = {}
        for label_name, labels in label_sets.items():
            samples = extract_training_samples(
                image, labels, manifest.train.sample_count, manifest.train.seed
            )
            model = train_svm(samples, manifest.train)
            self.context.models[label_name] = model
            self.write(f"model_{label_name}.csvm", save_model(model), "model")
            tree, non_tree = samples.class_counts()
            report[label_name] = {
                "tree_samples": tree,
                "non_tree_samples": non_tree,
                "support_vectors": model.support_count,
                "bias": model.bias,
                "training_accuracy": accuracy(model, samples),
            }
        self.context.training = report
        self.write_json("training.json", report, "report")
