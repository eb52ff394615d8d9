"""
LAS 1.2-1.4 reader.

The header is checked with struct before anything is decoded, so that a bad
file fails with a located error of the right kind. The point records are then
decoded by laspy. Supported point data record formats are 0 to 3 and, for
LAS 1.4, 6 and 7. Coordinates come back scaled by the header's scale and
offset; coordinate reference metadata in the variable length records is not
interpreted. LAZ files (compression bits set in the format byte) are
rejected.

Public header fields checked here (little-endian), offsets in bytes:
    0   "LASF"
    24  version major u8, minor u8
    94  header size u16
    96  offset to point data u32
    104 point data format u8
    105 point data record length u16
    107 legacy point count u32
LAS 1.4 adds a u64 point count at offset 247.
"""

import io
import logging
import struct

import laspy
import numpy as np

from ..utils.errors import (
    MalformedFileError,
    PointValidationError,
    TruncationError,
    UnsupportedFormatError,
)
from .pointcloud import PointCloud, first_invalid_point

logger = logging.getLogger(__name__)

LAS_SIGNATURE = b"LASF"
LAZ_COMPRESSION_BITS = 0xC0

# minor version -> smallest public header size
HEADER_SIZES: dict[int, int] = {2: 227, 3: 235, 4: 375}

# format id -> minimum record length
POINT_FORMATS: dict[int, int] = {0: 20, 1: 28, 2: 26, 3: 34, 6: 30, 7: 36}

# format id -> first minor version that defines it
_FORMAT_SINCE: dict[int, int] = {0: 2, 1: 2, 2: 2, 3: 2, 6: 4, 7: 4}

EXTENDED_FORMATS = (6, 7)


def _unpack(fmt: str, data: bytes, offset: int, what: str) -> tuple:
    size = struct.calcsize(fmt)
    if offset + size > len(data):
        raise TruncationError(f"LAS header ends inside {what}", len(data))
    return struct.unpack_from(fmt, data, offset)


def _check_header(data: bytes) -> tuple[int, int, int, int, int]:
    """
    Validate the header fields the decoder relies on.

    Returns:
        (minor version, point format, record length, point offset, point count)
    """
    if len(data) < 4 or data[:4] != LAS_SIGNATURE:
        raise MalformedFileError("missing 'LASF' signature; not a LAS file")

    major, minor = _unpack("<BB", data, 24, "version")
    if major != 1 or minor not in HEADER_SIZES:
        raise UnsupportedFormatError(f"unsupported LAS version {major}.{minor}")
    (header_size,) = _unpack("<H", data, 94, "header size")
    (point_offset,) = _unpack("<I", data, 96, "offset to point data")
    (format_byte,) = _unpack("<B", data, 104, "point data format")
    (record_length,) = _unpack("<H", data, 105, "point record length")
    (legacy_count,) = _unpack("<I", data, 107, "point count")

    if format_byte & LAZ_COMPRESSION_BITS:
        raise UnsupportedFormatError(
            f"point format {format_byte} is LAZ-compressed; decompress to LAS first",
            format_byte,
        )
    if format_byte not in POINT_FORMATS:
        raise UnsupportedFormatError(f"unsupported point data format {format_byte}", format_byte)
    if minor < _FORMAT_SINCE[format_byte]:
        raise UnsupportedFormatError(
            f"point format {format_byte} needs LAS 1.{_FORMAT_SINCE[format_byte]}, "
            f"file is LAS 1.{minor}",
            format_byte,
        )
    if record_length < POINT_FORMATS[format_byte]:
        raise MalformedFileError(
            f"record length {record_length} is shorter than format {format_byte} requires "
            f"({POINT_FORMATS[format_byte]})"
        )
    if header_size < HEADER_SIZES[minor] or point_offset < header_size:
        raise MalformedFileError(
            f"header size {header_size} / point offset {point_offset} are inconsistent "
            f"for LAS 1.{minor}"
        )

    count = legacy_count
    if minor >= 4:
        (count_64,) = _unpack("<Q", data, 247, "extended point count")
        if count_64 or format_byte in EXTENDED_FORMATS:
            count = count_64

    end = point_offset + count * record_length
    if end > len(data):
        raise TruncationError(
            f"header promises {count} points of {record_length} bytes ending at {end}, "
            f"file has {len(data)} bytes",
            len(data),
        )
    return minor, format_byte, record_length, point_offset, count


def parse_las(data: bytes, source_description: str = "") -> PointCloud:
    """
    Decode a LAS file.

    Args:
        data: Complete file contents
        source_description: Text stored on the resulting cloud

    Returns:
        PointCloud in record order

    Raises:
        MalformedFileError: Missing LASF signature or inconsistent header
        UnsupportedFormatError: LAZ compression or an unsupported version or point format
        TruncationError: Fewer bytes than the header promises
        PointValidationError: A record breaks the point invariants
    """
    minor, point_format, record_length, point_offset, count = _check_header(data)

    try:
        las = laspy.read(io.BytesIO(data))
    except (laspy.errors.LaspyException, ValueError, EOFError, struct.error) as e:
        raise MalformedFileError(f"LAS decoding failed: {e}") from e
    if len(las.points) != count:
        raise MalformedFileError(f"decoded {len(las.points)} points, header promises {count}")

    x = np.asarray(las.x, dtype=np.float64)
    y = np.asarray(las.y, dtype=np.float64)
    z = np.asarray(las.z, dtype=np.float64)
    intensity = np.asarray(las.intensity, dtype=np.int64)
    return_number = np.asarray(las.return_number, dtype=np.int64)
    num_returns = np.asarray(las.number_of_returns, dtype=np.int64)

    bad = first_invalid_point(x, y, z, intensity, return_number, num_returns)
    if bad is not None:
        index, reason = bad
        raise PointValidationError(
            f"record {index}: {reason}", offset=point_offset + index * record_length
        )

    logger.info(f"Decoded {count} points (LAS 1.{minor}, format {point_format})")
    return PointCloud(
        x, y, z, intensity, return_number, num_returns,
        source_description=source_description or f"LAS 1.{minor} format {point_format}",
    )
