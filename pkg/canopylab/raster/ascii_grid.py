"""
Esri ASCII grid reader and writer.

Header lines ncols, nrows, xllcorner (or xllcenter), yllcorner (or
yllcenter), cellsize and an optional NODATA_value, followed by nrows rows
of ncols values, top row first. Values are printed with 6 significant
digits.
"""

import logging
from typing import Optional, Union

import numpy as np

from ..utils import config
from ..utils.errors import DimensionMismatchError, HeaderError
from .grid import GridSpec
from .layers import CategoricalRaster, Raster

logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("ncols", "nrows", "cellsize")


def _printed(value: float) -> float:
    """The value a reader gets back from the written text."""
    return float(f"{value:.{config.ASCII_PRECISION}g}")


def _pick_sentinel(values: np.ndarray, valid: np.ndarray) -> float:
    """Default sentinel, stepped down until no valid value prints the same."""
    taken = {_printed(v) for v in values[valid]}
    sentinel = config.ASCII_NODATA_VALUE
    while _printed(sentinel) in taken:
        sentinel -= max(1.0, abs(sentinel) * 1e-3)
    return _printed(sentinel)


def _format_header(spec: GridSpec, nodata_value: Optional[float]) -> list[str]:
    bounds = spec.bounds
    lines = [
        f"ncols {spec.width}",
        f"nrows {spec.height}",
        f"xllcorner {bounds.min_x!r}",
        f"yllcorner {bounds.min_y!r}",
        f"cellsize {spec.cell_size!r}",
    ]
    if nodata_value is not None:
        lines.append(f"NODATA_value {nodata_value:.{config.ASCII_PRECISION}g}")
    return lines


def write_ascii_grid(raster: Union[Raster, CategoricalRaster]) -> str:
    """
    Serialise a raster as an Esri ASCII grid.

    Args:
        raster: Real-valued or categorical raster

    Returns:
        The grid text (newline-terminated)
    """
    if isinstance(raster, CategoricalRaster):
        lines = _format_header(raster.spec, float(raster.nodata_id))
        for row in raster.classes:
            lines.append(" ".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    valid = raster.valid
    sentinel = _pick_sentinel(raster.values, valid)
    lines = _format_header(raster.spec, sentinel)
    digits = config.ASCII_PRECISION
    blank = f"{sentinel:.{digits}g}"
    for values, ok in zip(raster.values, valid):
        cells = (f"{v:.{digits}g}" if good else blank for v, good in zip(values, ok))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


def _parse_header(lines: list[str]) -> tuple[dict[str, float], int]:
    """Read header key/value lines; returns the header and the first data line index."""
    header: dict[str, float] = {}
    index = 0
    while index < len(lines):
        parts = lines[index].split()
        if not parts:
            index += 1
            continue
        key = parts[0].lower()
        if key[0].isdigit() or key[0] in "+-.":
            break
        if len(parts) != 2:
            raise HeaderError(
                f"header line '{lines[index].strip()}' needs a key and a value", index + 1
            )
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise HeaderError(f"header value for '{parts[0]}' is not numeric", index + 1) from None
        index += 1
    for key in _REQUIRED_KEYS:
        if key not in header:
            raise HeaderError(f"missing header key '{key}'", index + 1)
    return header, index


def _spec_from_header(header: dict[str, float], line: int) -> GridSpec:
    ncols, nrows, cellsize = header["ncols"], header["nrows"], header["cellsize"]
    if ncols != int(ncols) or ncols < 1 or nrows != int(nrows) or nrows < 1:
        raise HeaderError("ncols and nrows must be positive integers", line)
    if cellsize <= 0:
        raise HeaderError("cellsize must be positive", line)
    if "xllcorner" in header:
        x_left = header["xllcorner"]
    elif "xllcenter" in header:
        x_left = header["xllcenter"] - cellsize / 2
    else:
        raise HeaderError("missing header key 'xllcorner'", line)
    if "yllcorner" in header:
        y_bottom = header["yllcorner"]
    elif "yllcenter" in header:
        y_bottom = header["yllcenter"] - cellsize / 2
    else:
        raise HeaderError("missing header key 'yllcorner'", line)
    height = int(nrows)
    return GridSpec(x_left, y_bottom + height * cellsize, cellsize, int(ncols), height)


def _parse_rows(lines: list[str], start: int, spec: GridSpec) -> np.ndarray:
    rows: list[list[float]] = []
    line_no = start
    for line_no, line in enumerate(lines[start:], start=start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(rows) == spec.height:
            raise DimensionMismatchError(f"more than nrows={spec.height} data rows", line_no)
        if len(parts) != spec.width:
            raise DimensionMismatchError(
                f"row has {len(parts)} values, ncols is {spec.width}", line_no
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise DimensionMismatchError("non-numeric value in data row", line_no) from None
    if len(rows) != spec.height:
        raise DimensionMismatchError(
            f"found {len(rows)} data rows, nrows is {spec.height} (file ends early)", line_no
        )
    return np.asarray(rows, dtype=np.float64)


def read_ascii_grid(text: str) -> Raster:
    """
    Parse an Esri ASCII grid into a Raster.

    Args:
        text: Grid file contents

    Returns:
        Raster with nodata where values equal NODATA_value

    Raises:
        HeaderError: Missing or malformed header key
        DimensionMismatchError: Data rows disagree with ncols/nrows
    """
    lines = text.splitlines()
    header, start = _parse_header(lines)
    spec = _spec_from_header(header, start)
    values = _parse_rows(lines, start, spec)
    if "nodata_value" in header:
        nodata = values == header["nodata_value"]
    else:
        nodata = np.zeros(spec.shape, dtype=bool)
    logger.debug(f"Read ASCII grid {spec.width}x{spec.height}, {int(nodata.sum())} nodata cells")
    return Raster(spec, np.where(nodata, 0.0, values), nodata)


def read_categorical_ascii_grid(
    text: str, class_names: Optional[dict[int, str]] = None
) -> CategoricalRaster:
    """
    Parse an Esri ASCII grid of integer class ids.

    Args:
        text: Grid file contents
        class_names: Id -> name table (default: the eight land-cover classes)

    Returns:
        CategoricalRaster whose nodata id is the file's NODATA_value
    """
    lines = text.splitlines()
    header, start = _parse_header(lines)
    spec = _spec_from_header(header, start)
    values = _parse_rows(lines, start, spec)
    if np.any(values != np.round(values)):
        raise DimensionMismatchError("class ids must be integers")
    nodata_id = int(header.get("nodata_value", config.LAND_COVER_NODATA))
    names = dict(config.LAND_COVER_CLASSES) if class_names is None else class_names
    return CategoricalRaster(spec, values.astype(np.int32), names, nodata_id)
