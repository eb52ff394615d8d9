"""
Pipeline orchestrator.

Runs the stages of a manifest in order, owns the run context they share and
turns any stage failure into a StageError with a failure marker on disk.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .evaluation.change import ChangeReport
from .evaluation.metrics import PerformanceRow
from .lidar.stats_rasterizer import StatsStack
from .manifest import RunManifest
from .managers.artifact_manager import ArtifactManager
from .models.svm import SvmModel
from .raster.files import load_mask
from .raster.grid import GridSpec
from .raster.layers import BinaryMask, MultibandRaster
from .raster.resample import resample_nearest
from .stages import STAGE_ORDER, BaseStage
from .utils import config
from .utils.errors import StageError

logger = logging.getLogger(__name__)

SUMMARY_STAGE = "summary"


@dataclass
class RunContext:
    """Intermediate results handed from stage to stage."""

    train_image: Optional[MultibandRaster] = None
    stack: Optional[StatsStack] = None
    noisy_mask: Optional[BinaryMask] = None
    training_labels: Optional[BinaryMask] = None
    models: dict[str, SvmModel] = field(default_factory=dict)
    training: dict[str, Any] = field(default_factory=dict)
    reference_grid: Optional[GridSpec] = None
    images: dict[int, MultibandRaster] = field(default_factory=dict)
    predictions: dict[str, dict[int, BinaryMask]] = field(default_factory=dict)
    performance: list[PerformanceRow] = field(default_factory=list)
    changes: list[tuple[str, int, int, ChangeReport]] = field(default_factory=list)


@dataclass(frozen=True)
class RunResult:
    """What a finished run produced."""

    output_dir: Path
    stages_run: tuple[str, ...]
    artifacts: tuple[dict[str, str], ...]
    summary: dict[str, Any]

    def artifact_paths(self) -> list[str]:
        return [entry["path"] for entry in self.artifacts]


class Pipeline:
    """
    Main pipeline class that orchestrates all stages.

    Stages run sequentially; each stage decides from the manifest whether it
    has anything to do.
    """

    def __init__(self, manifest: RunManifest) -> None:
        """
        Initialize the pipeline.

        Args:
            manifest: Validated run manifest

        Raises:
            ManifestError: If a referenced input file is missing
        """
        logger.info("Initializing pipeline...")
        manifest.check_files()
        self.manifest = manifest
        self.artifacts = ArtifactManager(manifest.output_dir)
        self.context = RunContext()
        self.stages: list[BaseStage] = [stage_class(self) for stage_class in STAGE_ORDER]
        self.current_stage: Optional[BaseStage] = None
        self._truth_cache: dict[tuple[int, GridSpec], BinaryMask] = {}
        logger.info(f"Initialization complete: {len(self.stages)} stages")

    def truth_mask(self, year: int, grid: GridSpec) -> Optional[BinaryMask]:
        """
        Exact labels of a year on a grid, or None when the manifest has none.

        Args:
            year: Label year
            grid: Grid to resample the labels onto

        Returns:
            BinaryMask on grid
        """
        path = self.manifest.truth.get(year)
        if path is None:
            return None
        key = (year, grid)
        if key not in self._truth_cache:
            mask = load_mask(path, self.manifest.tree_classes)
            self._truth_cache[key] = resample_nearest(mask, grid)
        return self._truth_cache[key]

    def run(self) -> RunResult:
        """
        Run every stage whose inputs are present.

        Returns:
            RunResult listing the artifacts

        Raises:
            StageError: Wrapping the first failure; partial outputs stay on disk
        """
        logger.info(f"Starting run into {self.manifest.output_dir}")
        stages_run: list[str] = []
        for stage in self.stages:
            if not stage.should_run():
                logger.info(f"Stage '{stage.name}' skipped: nothing to do")
                continue
            self.current_stage = stage
            try:
                stage.enter()
                stage.run()
                stage.exit()
            except Exception as e:
                self.artifacts.mark_failed(stage.name, e)
                raise StageError(stage.name, e) from e
            stages_run.append(stage.name)

        summary = self.summary(stages_run)
        self.artifacts.write_json(config.RUN_SUMMARY_FILE, summary, SUMMARY_STAGE, "summary")
        self.current_stage = None
        logger.info(f"Run complete: {len(self.artifacts.entries)} artifacts")
        return RunResult(
            output_dir=self.manifest.output_dir,
            stages_run=tuple(stages_run),
            artifacts=tuple(self.artifacts.entries),
            summary=summary,
        )

    def summary(self, stages_run: list[str]) -> dict[str, Any]:
        """Machine-readable digest of the run (no timings, so reruns match)."""
        manifest = self.manifest
        return {
            "stages": stages_run,
            "train_year": manifest.train_year,
            "years": manifest.years,
            "seed": manifest.seed,
            "rule": manifest.rule,
            "training": self.context.training,
            "performance": [row.as_dict() for row in self.context.performance],
            "changes": [
                {"aoi_name": aoi, "year_t1": t1, "year_t2": t2, **report.as_dict()}
                for aoi, t1, t2, report in self.context.changes
            ],
        }


def run_pipeline(manifest: RunManifest) -> RunResult:
    """
    Execute rasterize, label, train, predict, evaluate, change and overlay.

    Args:
        manifest: Run manifest

    Returns:
        RunResult of the finished run

    Raises:
        ManifestError: Missing input files (before any stage runs)
        StageError: A stage failed
    """
    return Pipeline(manifest).run()
