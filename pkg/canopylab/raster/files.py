"""
Loading raster layers from disk by file extension.

.cnpy   multiband container
.mask   binary mask container
.asc    Esri ASCII grid (land-cover ids when read as a mask)
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

from ..utils.errors import InputError, UnsupportedFormatError
from .ascii_grid import read_ascii_grid, read_categorical_ascii_grid
from .container import read_container, read_mask
from .layers import BinaryMask, MultibandRaster, categorical_to_mask

logger = logging.getLogger(__name__)

MASK_SUFFIXES: tuple[str, ...] = (".mask", ".asc")
RASTER_SUFFIXES: tuple[str, ...] = (".cnpy", ".asc")


def read_bytes(path: Union[str, Path]) -> bytes:
    """
    Read a whole file.

    Raises:
        InputError: If the file cannot be read
    """
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e


def read_text(path: Union[str, Path]) -> str:
    """Read a UTF-8 text file, raising InputError on failure."""
    try:
        return read_bytes(path).decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def load_raster(path: Union[str, Path]) -> MultibandRaster:
    """
    Load imagery or any multiband layer.

    Args:
        path: .cnpy container, or .asc grid (loaded as one band named after the file)

    Returns:
        MultibandRaster
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".cnpy":
        raster = read_container(read_bytes(path))
    elif suffix == ".asc":
        raster = MultibandRaster.from_rasters([(path.stem, read_ascii_grid(read_text(path)))])
    else:
        raise UnsupportedFormatError(
            f"{path}: raster files must end in one of {', '.join(RASTER_SUFFIXES)}"
        )
    logger.debug(f"Loaded raster {path}: bands {list(raster.names)}, grid {raster.spec.shape}")
    return raster


def load_mask(path: Union[str, Path], tree_classes: Optional[Sequence[int]] = None) -> BinaryMask:
    """
    Load a tree mask.

    Args:
        path: .mask container, or .asc land-cover grid
        tree_classes: Land-cover ids counted as tree in .asc files (default Tree Canopy)

    Returns:
        BinaryMask
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".mask":
        return read_mask(read_bytes(path))
    if suffix == ".asc":
        return categorical_to_mask(read_categorical_ascii_grid(read_text(path)), tree_classes)
    raise UnsupportedFormatError(
        f"{path}: mask files must end in one of {', '.join(MASK_SUFFIXES)}"
    )
