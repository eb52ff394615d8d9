"""Change stage: tree-cover change for consecutive inference years."""

import logging

from ..evaluation.change import change
from ..raster.container import write_mask
from ..raster.grid import Window
from .base_stage import BaseStage
from .train_stage import NOISY

logger = logging.getLogger(__name__)

WHOLE_GRID_AOI = "all"


class ChangeStage(BaseStage):
    """Produces one change report per (AOI, consecutive year pair)."""

    name = "change"

    def should_run(self) -> bool:
        return len(self.pipeline.manifest.years) >= 2

    def aois(self) -> dict[str, Window]:
        """The manifest's AOIs, or the whole grid when it names none."""
        if self.pipeline.manifest.aois:
            return dict(self.pipeline.manifest.aois)
        grid = self.context.reference_grid
        return {WHOLE_GRID_AOI: Window(0, 0, grid.width, grid.height)}

    def run(self) -> None:
        predictions = self.context.predictions[NOISY]
        for aoi_name, window in self.aois().items():
            for earlier, later in self.pipeline.manifest.year_pairs:
                report = change(predictions[earlier], predictions[later], window)
                stem = f"change_{aoi_name}_{earlier}_{later}"
                entry = {"aoi_name": aoi_name, "year_t1": earlier, "year_t2": later}
                entry.update(report.as_dict())
                self.write_json(f"{stem}.json", entry, "change")
                loss_name = f"loss_{aoi_name}_{earlier}_{later}.mask"
                self.write(loss_name, write_mask(report.loss_mask), "mask")
                self.context.changes.append((aoi_name, earlier, later, report))
                logger.info(
                    f"AOI '{aoi_name}' {earlier}->{later}: "
                    f"{report.relative_change_pct:+.1f}% tree cover"
                )
