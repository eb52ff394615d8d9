"""
Plain-text point format.

One point per line: ``x y z [intensity] [return_number] [num_returns]``,
separated by whitespace or commas. Blank lines and lines starting with ``#``
are skipped. Omitted trailing fields default to intensity 0 and return 1 of 1.
"""

import logging
import math
import re
from typing import Optional

from ..utils import config
from ..utils.errors import PointParseError, PointValidationError
from .pointcloud import LidarPoint, PointCloud

logger = logging.getLogger(__name__)

_SEPARATORS = re.compile(r"[,\s]+")
_DEFAULTS = (0, 1, 1)


def _parse_integer(token: str, name: str, line: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise PointParseError(f"{name} '{token}' is not a number", line) from None
    if not value.is_integer():
        raise PointParseError(f"{name} '{token}' is not an integer", line)
    return int(value)


def _parse_line(content: str, line: int) -> LidarPoint:
    fields = [field for field in _SEPARATORS.split(content) if field]
    if len(fields) < 3 or len(fields) > 6:
        raise PointParseError(f"expected 3 to 6 fields, found {len(fields)}", line)
    coords = []
    for name, token in zip(("x", "y", "z"), fields[:3]):
        try:
            coords.append(float(token))
        except ValueError:
            raise PointParseError(f"{name} '{token}' is not a number", line) from None
    extras = [
        _parse_integer(token, name, line)
        for name, token in zip(("intensity", "return_number", "num_returns"), fields[3:])
    ]
    extras += _DEFAULTS[len(extras):]
    return LidarPoint(*coords, *extras)


def _point_problem(point: LidarPoint) -> Optional[str]:
    if not all(math.isfinite(value) for value in point[:3]):
        return "coordinates must be finite"
    if not 0 <= point.intensity <= 65535:
        return "intensity must lie in 0..65535"
    if point.return_number < 1 or point.num_returns < 1:
        return "return fields must be at least 1"
    if point.return_number > point.num_returns:
        return "return number exceeds number of returns"
    return None


def parse_xyz_text(text: str, source_description: str = "") -> PointCloud:
    """
    Parse the text point format.

    Args:
        text: File contents
        source_description: Text stored on the resulting cloud

    Returns:
        PointCloud holding one point per data line, in file order

    Raises:
        PointParseError: A field is missing or not numeric
        PointValidationError: A point breaks the point invariants
    """
    points: list[LidarPoint] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.strip()
        if not content or content.startswith(config.TEXT_COMMENT_PREFIX):
            continue
        point = _parse_line(content, number)
        problem = _point_problem(point)
        if problem is not None:
            raise PointValidationError(problem, line=number)
        points.append(point)
    logger.info(f"Parsed {len(points)} points from text")
    return PointCloud.from_points(points, source_description or "xyz text")


def format_xyz_text(cloud: PointCloud) -> str:
    """
    Render a cloud in the text point format with all six fields.

    Coordinates are written with the shortest representation that reads back
    to the same float.
    """
    columns = zip(
        cloud.x.tolist(),
        cloud.y.tolist(),
        cloud.z.tolist(),
        cloud.intensity.tolist(),
        cloud.return_number.tolist(),
        cloud.num_returns.tolist(),
    )
    rows = [f"{x!r} {y!r} {z!r} {i} {rn} {nr}" for x, y, z, i, rn, nr in columns]
    return "\n".join(["# x y z intensity return_number num_returns", *rows]) + "\n"
