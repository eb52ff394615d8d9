"""Point cloud file loading with format sniffing."""

import logging
from pathlib import Path
from typing import Union

from ..utils.errors import InputError
from .las_reader import LAS_SIGNATURE, parse_las
from .pointcloud import PointCloud
from .text_reader import parse_xyz_text

logger = logging.getLogger(__name__)


def read_point_cloud(data: bytes, source_description: str = "") -> PointCloud:
    """
    Decode point cloud bytes, choosing the reader from the first four bytes.

    Args:
        data: File contents
        source_description: Text stored on the resulting cloud

    Returns:
        The decoded PointCloud

    Raises:
        InputError: If neither reader accepts the data
    """
    if data[:4] == LAS_SIGNATURE:
        return parse_las(data, source_description)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(
            "point file is neither LAS (no 'LASF' signature) nor UTF-8 text"
        ) from None
    return parse_xyz_text(text, source_description)


def load_point_cloud(path: Union[str, Path]) -> PointCloud:
    """
    Read a LAS or text point file.

    Args:
        path: File to read

    Returns:
        The decoded PointCloud

    Raises:
        InputError: If the file cannot be read or decoded
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read point file {path}: {e}") from e
    logger.info(f"Loading point cloud {path} ({len(data)} bytes)")
    return read_point_cloud(data, str(path))
