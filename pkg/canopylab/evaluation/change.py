"""
Tree-cover change between two epochs and the fallen-tree overlay.

Areas are tree-pixel counts over cells valid in both epochs (and inside the
area of interest, when one is given). Relative change is taken against the
earlier epoch's tree area.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..raster.grid import Window
from ..raster.layers import BinaryMask, MultibandRaster
from ..raster.png import encode_png, raster_to_rgb
from ..utils import config
from ..utils.errors import GridMismatchError, ParameterError, UndefinedBaselineError

logger = logging.getLogger(__name__)

# keeps exact integer blends from truncating one below
_BLEND_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class ChangeReport:
    """
    Change between an earlier and a later tree mask.

    Attributes:
        area_t1_px: Tree pixels in the earlier epoch
        area_t2_px: Tree pixels in the later epoch
        relative_change_pct: 100 * (area_t2 - area_t1) / area_t1
        loss_mask: Tree in the earlier epoch only
        gain_mask: Tree in the later epoch only
        window: Area of interest, None for the whole grid
    """

    area_t1_px: int
    area_t2_px: int
    relative_change_pct: float
    loss_mask: BinaryMask
    gain_mask: BinaryMask
    window: Optional[Window] = None

    @property
    def loss_px(self) -> int:
        return self.loss_mask.tree_count()

    @property
    def gain_px(self) -> int:
        return self.gain_mask.tree_count()

    def as_dict(self) -> dict:
        return {
            "area_t1_px": self.area_t1_px,
            "area_t2_px": self.area_t2_px,
            "relative_change_pct": self.relative_change_pct,
            "loss_px": self.loss_px,
            "gain_px": self.gain_px,
            "compared_px": int(np.count_nonzero(self.loss_mask.valid)),
            "aoi": None if self.window is None else self.window.as_dict(),
        }


def change(
    mask_t1: BinaryMask, mask_t2: BinaryMask, aoi: Optional[Window] = None
) -> ChangeReport:
    """
    Compare two epochs.

    Args:
        mask_t1: Earlier tree mask
        mask_t2: Later tree mask on the same grid
        aoi: Optional sub-window in cell units

    Returns:
        ChangeReport; loss and gain masks are valid only inside the compared region

    Raises:
        GridMismatchError: Masks on different grids
        AoiError: The window leaves the grid
        UndefinedBaselineError: The earlier epoch has no tree pixel in the region
    """
    if mask_t1.spec != mask_t2.spec:
        raise GridMismatchError(
            f"epoch grids differ: {mask_t1.spec} vs {mask_t2.spec}; resample first"
        )
    spec = mask_t1.spec
    region = mask_t1.valid & mask_t2.valid
    if aoi is not None:
        spec.check_window(aoi)
        inside = np.zeros(spec.shape, dtype=bool)
        inside[aoi.row_off:aoi.row_off + aoi.height, aoi.col_off:aoi.col_off + aoi.width] = True
        region &= inside

    t1 = mask_t1.bits & region
    t2 = mask_t2.bits & region
    area_t1 = int(np.count_nonzero(t1))
    area_t2 = int(np.count_nonzero(t2))
    if area_t1 == 0:
        raise UndefinedBaselineError(
            "earlier epoch has no tree pixel in the compared region; relative change is undefined"
        )
    report = ChangeReport(
        area_t1_px=area_t1,
        area_t2_px=area_t2,
        relative_change_pct=100.0 * (area_t2 - area_t1) / area_t1,
        loss_mask=BinaryMask(spec, t1 & ~t2, region),
        gain_mask=BinaryMask(spec, ~t1 & t2, region),
        window=aoi,
    )
    logger.info(
        f"Tree area {area_t1} -> {area_t2} px ({report.relative_change_pct:+.1f}%), "
        f"loss {report.loss_px} px, gain {report.gain_px} px"
    )
    return report


def blend_overlay(
    rgb: np.ndarray,
    highlight: np.ndarray,
    alpha: float,
    color: tuple[int, int, int] = config.OVERLAY_COLOR,
) -> np.ndarray:
    """
    Alpha-blend highlighted pixels toward a color.

    out = floor((1 - alpha) * base + alpha * color) on highlighted pixels;
    all other pixels are returned unchanged.

    Rounding is a floor taken after adding 1e-9, so sums that land a hair
    below an integer through float error still reach it, while true halves
    round down: gray 100 at alpha 0.5 toward (255, 0, 0) gives (177, 50, 50).

    Args:
        rgb: uint8 array (height, width, 3)
        highlight: bool array (height, width)
        alpha: Blend weight in [0, 1]
        color: Target RGB color

    Returns:
        New uint8 array
    """
    if not (math.isfinite(alpha) and 0.0 <= alpha <= 1.0):
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    out = rgb.copy()
    base = rgb[highlight].astype(np.float64)
    blended = (1.0 - alpha) * base + alpha * np.asarray(color, dtype=np.float64)
    out[highlight] = np.clip(np.floor(blended + _BLEND_EPSILON), 0, 255).astype(np.uint8)
    return out


def overlay_png(
    base: MultibandRaster,
    loss: BinaryMask,
    alpha: Optional[float] = None,
    bands: Optional[Sequence[str]] = None,
    value_range: Optional[tuple[float, float]] = config.IMAGE_VALUE_RANGE,
) -> bytes:
    """
    Render imagery with loss pixels blended toward red.

    Args:
        base: Imagery with at least three bands
        loss: Mask whose tree cells are highlighted
        alpha: Blend weight in [0, 1] (default config.OVERLAY_ALPHA)
        bands: R, G, B band names (default: the first three bands)
        value_range: Fixed byte scaling (default 0..255); None scales per band

    Returns:
        PNG bytes

    Raises:
        GridMismatchError: Image and mask on different grids
        ParameterError: alpha outside [0, 1]
    """
    alpha = config.OVERLAY_ALPHA if alpha is None else alpha
    if base.spec != loss.spec:
        raise GridMismatchError(
            f"image grid {base.spec} differs from loss grid {loss.spec}; resample first"
        )
    rgb = raster_to_rgb(base, bands, value_range)
    pixels = blend_overlay(rgb, loss.tree, alpha)
    logger.debug(f"Overlay blended {loss.tree_count()} loss pixels at alpha {alpha}")
    return encode_png(pixels)
