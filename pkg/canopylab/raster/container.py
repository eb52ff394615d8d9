"""
Multiband container format (.cnpy) and mask files.

Layout, all little-endian:

    magic "CNPY" | version u16 | band count u16 | width u32 | height u32
    cell_size f64 | origin_x f64 | origin_y f64
    per band:
        name length u16 | UTF-8 name
        values f32 x (width * height), row-major
        nodata bitmap, 1 bit per cell, row-major, least significant bit
        first, each row zero-padded to whole bytes

A BinaryMask is stored as a 1-band container named "mask" holding 0/1 with
invalid cells flagged in the nodata bitmap.
"""

import logging
import struct

import numpy as np

from ..utils import config
from ..utils.errors import (
    BandMismatchError,
    InputError,
    MalformedFileError,
    TruncationError,
    UnsupportedFormatError,
)
from .grid import GridSpec
from .layers import BinaryMask, MultibandRaster

logger = logging.getLogger(__name__)

_HEADER = struct.Struct("<4sHHIIddd")
_NAME_LENGTH = struct.Struct("<H")


def _row_bytes(width: int) -> int:
    return (width + 7) // 8


def write_container(raster: MultibandRaster) -> bytes:
    """
    Serialise a multiband raster.

    Args:
        raster: Bands to store (values are narrowed to float32)

    Returns:
        Container bytes
    """
    spec = raster.spec
    chunks = [
        _HEADER.pack(
            config.CONTAINER_MAGIC,
            config.CONTAINER_VERSION,
            raster.band_count,
            spec.width,
            spec.height,
            spec.cell_size,
            spec.origin_x,
            spec.origin_y,
        )
    ]
    for i, name in enumerate(raster.names):
        encoded = name.encode("utf-8")
        chunks.append(_NAME_LENGTH.pack(len(encoded)))
        chunks.append(encoded)
        values = np.where(raster.nodata[i], 0.0, raster.values[i])
        chunks.append(values.astype("<f4").tobytes())
        chunks.append(np.packbits(raster.nodata[i], axis=1, bitorder="little").tobytes())
    return b"".join(chunks)


class _Reader:
    """Cursor over container bytes that reports truncation with its offset."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise TruncationError(
                f"container ends inside {what}: need {size} bytes, have "
                f"{len(self.data) - self.offset}",
                self.offset,
            )
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk


def read_container(data: bytes) -> MultibandRaster:
    """
    Parse container bytes.

    Args:
        data: Container file contents

    Returns:
        The stored multiband raster

    Raises:
        MalformedFileError: Bad magic
        UnsupportedFormatError: Unknown version
        TruncationError: Data ends early
    """
    if data[:4] != config.CONTAINER_MAGIC:
        raise MalformedFileError("missing CNPY signature; not a canopylab container")
    reader = _Reader(data)
    magic, version, band_count, width, height, cell_size, origin_x, origin_y = _HEADER.unpack(
        reader.take(_HEADER.size, "header")
    )
    if version != config.CONTAINER_VERSION:
        raise UnsupportedFormatError(f"unsupported container version {version}", version)
    if band_count < 1:
        raise MalformedFileError("container holds no bands")
    spec = GridSpec(origin_x, origin_y, cell_size, width, height)

    names, planes, masks = [], [], []
    cells = width * height
    for band in range(band_count):
        (length,) = _NAME_LENGTH.unpack(reader.take(_NAME_LENGTH.size, f"band {band} name length"))
        try:
            names.append(reader.take(length, f"band {band} name").decode("utf-8"))
        except UnicodeDecodeError:
            raise MalformedFileError(f"band {band} name is not valid UTF-8") from None
        raw = reader.take(cells * 4, f"band {band} values")
        planes.append(np.frombuffer(raw, dtype="<f4").reshape(height, width).astype(np.float64))
        packed = np.frombuffer(
            reader.take(height * _row_bytes(width), f"band {band} nodata bitmap"), dtype=np.uint8
        ).reshape(height, _row_bytes(width))
        masks.append(np.unpackbits(packed, axis=1, count=width, bitorder="little").astype(bool))
    if reader.offset != len(data):
        logger.warning(f"Ignoring {len(data) - reader.offset} trailing bytes after container data")
    logger.debug(f"Read container {width}x{height} with bands {names}")
    return MultibandRaster(spec, tuple(names), np.stack(planes), np.stack(masks))


def write_mask(mask: BinaryMask) -> bytes:
    """Serialise a mask as a 1-band container."""
    raster = MultibandRaster(
        mask.spec,
        (config.MASK_BAND_NAME,),
        mask.bits.astype(np.float64)[None],
        (~mask.valid)[None],
    )
    return write_container(raster)


def read_mask(data: bytes) -> BinaryMask:
    """
    Parse a mask file.

    Raises:
        BandMismatchError: The container does not hold exactly one band
        InputError: A valid cell holds something other than 0 or 1
    """
    raster = read_container(data)
    if raster.band_count != 1:
        raise BandMismatchError(f"mask files hold one band, found {raster.band_count}")
    values, nodata = raster.values[0], raster.nodata[0]
    valid = ~nodata
    if np.any((values[valid] != 0.0) & (values[valid] != 1.0)):
        raise InputError("mask band holds values other than 0 and 1")
    return BinaryMask(raster.spec, values == 1.0, valid)
