"""Grid geometry, raster layers, resampling and raster file formats."""

from .ascii_grid import read_ascii_grid, read_categorical_ascii_grid, write_ascii_grid
from .container import read_container, read_mask, write_container, write_mask
from .files import load_mask, load_raster, read_bytes, read_text
from .grid import BoundingBox, GridSpec, Window, cell_centers, cell_of, cells_of, center_of
from .layers import (
    BinaryMask,
    CategoricalRaster,
    MultibandRaster,
    Raster,
    categorical_to_mask,
)
from .png import decode_png, export_png
from .resample import resample_nearest

__all__ = [
    "BinaryMask",
    "BoundingBox",
    "CategoricalRaster",
    "GridSpec",
    "MultibandRaster",
    "Raster",
    "Window",
    "categorical_to_mask",
    "cell_centers",
    "cell_of",
    "cells_of",
    "center_of",
    "decode_png",
    "export_png",
    "load_mask",
    "load_raster",
    "read_ascii_grid",
    "read_categorical_ascii_grid",
    "read_container",
    "read_bytes",
    "read_mask",
    "read_text",
    "resample_nearest",
    "write_ascii_grid",
    "write_container",
    "write_mask",
]
