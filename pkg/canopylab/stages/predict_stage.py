"""
Predict stage: classify every inference year.

Predictions of all years are put onto the first inference image's grid so
that later stages compare them cell for cell.
"""

import logging

from ..models.svm import predict_mask
from ..raster.container import write_mask
from ..raster.files import load_raster
from ..raster.png import export_png
from ..raster.resample import resample_nearest
from .base_stage import BaseStage

logger = logging.getLogger(__name__)


class PredictStage(BaseStage):
    """Produces one tree mask per (model, year)."""

    name = "predict"

    def run(self) -> None:
        manifest = self.pipeline.manifest
        for year, path in manifest.predict.items():
            image = load_raster(path)
            if self.context.reference_grid is None:
                self.context.reference_grid = image.spec
            image = resample_nearest(image, self.context.reference_grid)
            self.context.images[year] = image

            for model_name, model in self.context.models.items():
                mask = predict_mask(model, image, manifest.threads)
                self.context.predictions.setdefault(model_name, {})[year] = mask
                self.write(f"prediction_{model_name}_{year}.mask", write_mask(mask), "mask")
                self.write(f"prediction_{model_name}_{year}.png", export_png(mask), "preview")
            logger.info(f"Predicted year {year} with {len(self.context.models)} model(s)")
