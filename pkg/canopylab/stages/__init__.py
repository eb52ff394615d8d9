"""Pipeline stages, run in the order of STAGE_ORDER."""

from .base_stage import BaseStage
from .change_stage import ChangeStage
from .evaluate_stage import EvaluateStage
from .label_stage import LabelStage
from .overlay_stage import OverlayStage
from .predict_stage import PredictStage
from .rasterize_stage import RasterizeStage
from .train_stage import EXACT, NOISY, TrainStage

STAGE_ORDER: tuple[type[BaseStage], ...] = (
    RasterizeStage,
    LabelStage,
    TrainStage,
    PredictStage,
    EvaluateStage,
    ChangeStage,
    OverlayStage,
)

__all__ = [
    "BaseStage",
    "ChangeStage",
    "EXACT",
    "EvaluateStage",
    "LabelStage",
    "NOISY",
    "OverlayStage",
    "PredictStage",
    "RasterizeStage",
    "STAGE_ORDER",
    "TrainStage",
]
