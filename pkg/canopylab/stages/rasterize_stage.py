"""
Rasterize stage: point cloud to statistics stack.

The statistics grid covers the training imagery's extent at the manifest's
cell size. A saved stack (.cnpy) is used as it is.
"""

import logging

from ..lidar.loader import load_point_cloud
from ..lidar.stats_rasterizer import (
    load_stats_stack,
    rasterize_stats,
    stack_grid_for,
    stack_to_pseudo_rgb,
)
from ..raster.container import write_container
from ..raster.files import load_raster
from ..raster.png import export_png
from .base_stage import BaseStage

logger = logging.getLogger(__name__)

STACK_SUFFIX = ".cnpy"


class RasterizeStage(BaseStage):
    """Produces the LiDAR statistics stack."""

    name = "rasterize"

    def enter(self) -> None:
        """Load the training imagery, which fixes the statistics grid."""
        super().enter()
        self.context.train_image = load_raster(self.pipeline.manifest.train_image)

    def run(self) -> None:
        manifest = self.pipeline.manifest
        if manifest.cloud.suffix.lower() == STACK_SUFFIX:
            stack = load_stats_stack(manifest.cloud)
        else:
            cloud = load_point_cloud(manifest.cloud)
            grid = stack_grid_for(self.context.train_image.spec, manifest.cell_size)
            stack = rasterize_stats(cloud, grid, manifest.radius, manifest.threads)
        self.context.stack = stack
        self.write("stats.cnpy", write_container(stack.multiband), "stats")
        self.write("stats_preview.png", export_png(stack_to_pseudo_rgb(stack)), "preview")
