"""Overlay stage: earlier-year imagery with lost tree cover blended toward red."""

import logging

from ..evaluation.change import overlay_png
from .base_stage import BaseStage

logger = logging.getLogger(__name__)


class OverlayStage(BaseStage):
    """Produces one PNG per change report."""

    name = "overlay"

    def should_run(self) -> bool:
        return len(self.pipeline.manifest.years) >= 2

    def run(self) -> None:
        manifest = self.pipeline.manifest
        for aoi_name, earlier, later, report in self.context.changes:
            png = overlay_png(
                self.context.images[earlier],
                report.loss_mask,
                manifest.overlay_alpha,
                manifest.overlay_bands,
            )
            self.write(f"overlay_{aoi_name}_{earlier}_{later}.png", png, "overlay")
