"""
Abstract base class for pipeline stages.

All stages (rasterize, label, train, predict, evaluate, change, overlay)
inherit from this class.
"""

import logging
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..pipeline import Pipeline, RunContext

logger = logging.getLogger(__name__)


class BaseStage(ABC):
    """
    Abstract base class for all pipeline stages.

    Each stage reads what earlier stages left in the run context, does one
    step of the pipeline and writes its artifacts through the pipeline's
    ArtifactManager.
    """

    name: str = "stage"

    def __init__(self, pipeline: "Pipeline") -> None:
        """
        Initialize the base stage.

        Args:
            pipeline: Reference to the running Pipeline
        """
        self.pipeline = pipeline

    @property
    def context(self) -> "RunContext":
        return self.pipeline.context

    def should_run(self) -> bool:
        """
        Whether the manifest gives this stage anything to do.

        Override to skip a stage whose inputs are absent.
        """
        return True

    @abstractmethod
    def run(self) -> None:
        """Execute the stage."""
        pass

    def write(self, name: str, data, kind: str):
        """Write an artifact attributed to this stage."""
        return self.pipeline.artifacts.write(name, data, self.name, kind)

    def write_json(self, name: str, payload, kind: str):
        """Write a JSON artifact attributed to this stage."""
        return self.pipeline.artifacts.write_json(name, payload, self.name, kind)

    def enter(self) -> None:
        """
        Called before run().

        Override this method to load inputs the stage owns.
        """
        logger.info(f"Stage '{self.name}' starting")

    def exit(self) -> None:
        """
        Called after run() succeeded.

        Override this method to release large intermediates.
        """
        logger.debug(f"Stage '{self.name}' finished")
