"""
PNG rendering of rasters and masks.

Single bands render as 8-bit grayscale, three-band composites as 8-bit RGB.
Each band is scaled linearly from its own valid min/max to 0..255 unless a
fixed value range is given; nodata pixels render black. Masks render with a
tree / non-tree / invalid palette.
"""

import logging
from typing import Optional, Sequence, Union

import cv2
import numpy as np

from ..utils import config
from ..utils.errors import BandMismatchError, InternalError
from ..utils.helpers import scale_to_bytes
from .layers import BinaryMask, MultibandRaster, Raster

logger = logging.getLogger(__name__)


def band_to_bytes(
    values: np.ndarray,
    nodata: np.ndarray,
    value_range: Optional[tuple[float, float]] = None,
) -> np.ndarray:
    """
    Scale one band to uint8.

    Args:
        values: Band values (height, width)
        nodata: Nodata mask (height, width)
        value_range: Fixed (min, max); per-band valid min/max when None

    Returns:
        uint8 array with nodata pixels set to config.NODATA_PIXEL
    """
    valid = ~nodata
    if value_range is not None:
        vmin, vmax = value_range
    elif valid.any():
        vmin, vmax = float(values[valid].min()), float(values[valid].max())
    else:
        vmin, vmax = 0.0, 0.0
    scaled = scale_to_bytes(values, vmin, vmax)
    scaled[nodata] = config.NODATA_PIXEL
    return scaled


def raster_to_rgb(
    raster: MultibandRaster,
    bands: Optional[Sequence[str]] = None,
    value_range: Optional[tuple[float, float]] = None,
) -> np.ndarray:
    """
    Build an 8-bit RGB array from three bands.

    Args:
        raster: Source bands
        bands: Band names for R, G, B (default: the first three bands)
        value_range: Fixed scaling range shared by all bands

    Returns:
        uint8 array (height, width, 3)
    """
    if bands is None:
        if raster.band_count < 3:
            raise BandMismatchError(
                f"an RGB composite needs three bands, raster has {raster.band_count}"
            )
        bands = raster.names[:3]
    if len(bands) != 3:
        raise BandMismatchError(f"an RGB composite needs three bands, got {list(bands)}")
    selected = raster.require_bands(bands)
    planes = [
        band_to_bytes(selected.values[i], selected.nodata[i], value_range) for i in range(3)
    ]
    return np.stack(planes, axis=-1)


def mask_to_rgb(mask: BinaryMask) -> np.ndarray:
    """Paint a mask with the tree / non-tree / invalid palette."""
    rgb = np.empty(mask.spec.shape + (3,), dtype=np.uint8)
    rgb[...] = config.MASK_INVALID_COLOR
    rgb[mask.tree] = config.MASK_TREE_COLOR
    rgb[mask.non_tree] = config.MASK_OTHER_COLOR
    return rgb


def encode_png(pixels: np.ndarray) -> bytes:
    """
    Encode a grayscale (H, W) or RGB (H, W, 3) uint8 array as PNG.

    Raises:
        InternalError: If the encoder rejects the array
    """
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim == 3:
        pixels = np.ascontiguousarray(pixels[..., ::-1])  # OpenCV stores BGR
    ok, buffer = cv2.imencode(".png", pixels)
    if not ok:
        raise InternalError(f"PNG encoding failed for array of shape {pixels.shape}")
    return buffer.tobytes()


def decode_png(data: bytes) -> np.ndarray:
    """
    Decode PNG bytes to a grayscale (H, W) or RGB (H, W, 3) uint8 array.

    Raises:
        ValueError: If the bytes are not a decodable image
    """
    pixels = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise ValueError("bytes are not a decodable PNG image")
    if pixels.ndim == 3:
        pixels = pixels[..., :3][..., ::-1]
    return np.ascontiguousarray(pixels)


def export_png(
    layer: Union[MultibandRaster, Raster, BinaryMask],
    bands: Optional[Sequence[str]] = None,
    value_range: Optional[tuple[float, float]] = None,
) -> bytes:
    """
    Render a layer as PNG.

    Args:
        layer: A raster (grayscale), a multiband raster (grayscale for one
            band or selected band, RGB for three) or a mask (palette RGB)
        bands: Band names to render from a multiband raster
        value_range: Fixed scaling range; per-band min/max when None

    Returns:
        PNG bytes
    """
    if isinstance(layer, BinaryMask):
        return encode_png(mask_to_rgb(layer))
    if isinstance(layer, Raster):
        return encode_png(band_to_bytes(layer.values, layer.nodata, value_range))
    if bands is not None and len(bands) == 1:
        layer = layer.require_bands(bands)
    if layer.band_count == 1:
        return encode_png(band_to_bytes(layer.values[0], layer.nodata[0], value_range))
    pixels = raster_to_rgb(layer, bands, value_range)
    logger.debug(f"Rendered RGB composite of {list(bands or layer.names[:3])}")
    return encode_png(pixels)
