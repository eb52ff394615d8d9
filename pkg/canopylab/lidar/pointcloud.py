"""
LiDAR point types.

A PointCloud stores its returns column-wise in read-only numpy arrays and
exposes them as LidarPoint records in file order.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

import numpy as np

from ..raster.grid import BoundingBox
from ..utils.errors import EmptyInputError, PointValidationError


class LidarPoint(NamedTuple):
    """One laser return."""

    x: float
    y: float
    z: float
    intensity: int = 0
    return_number: int = 1
    num_returns: int = 1


def _column(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True).reshape(-1)
    array.setflags(write=False)
    return array


def first_invalid_point(
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    intensity: np.ndarray,
    return_number: np.ndarray,
    num_returns: np.ndarray,
) -> Optional[tuple[int, str]]:
    """
    Locate the first point breaking the point invariants.

    Returns:
        (index, reason) of the first bad point, or None if all are valid
    """
    checks = (
        (~(np.isfinite(x) & np.isfinite(y) & np.isfinite(z)), "coordinates must be finite"),
        ((intensity < 0) | (intensity > 65535), "intensity must lie in 0..65535"),
        (return_number < 1, "return number must be at least 1"),
        (num_returns < 1, "number of returns must be at least 1"),
        (return_number > num_returns, "return number exceeds number of returns"),
    )
    first: Optional[tuple[int, str]] = None
    for bad, reason in checks:
        hits = np.flatnonzero(bad)
        if hits.size and (first is None or hits[0] < first[0]):
            first = (int(hits[0]), reason)
    return first


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    Georeferenced LiDAR returns.

    Attributes:
        x, y, z: Coordinates in meters (projected CRS)
        intensity: Reflected intensity, 0..65535
        return_number: Index of the return within its pulse (>= 1)
        num_returns: Returns generated by the pulse (>= 1)
        source_description: Free text describing the origin
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    intensity: np.ndarray
    return_number: np.ndarray
    num_returns: np.ndarray
    source_description: str = ""

    def __post_init__(self) -> None:
        for name, dtype in (
            ("x", np.float64),
            ("y", np.float64),
            ("z", np.float64),
            ("intensity", np.int64),
            ("return_number", np.int64),
            ("num_returns", np.int64),
        ):
            object.__setattr__(self, name, _column(getattr(self, name), dtype))
        sizes = {len(self.x), len(self.y), len(self.z), len(self.intensity),
                 len(self.return_number), len(self.num_returns)}
        if len(sizes) != 1:
            raise PointValidationError(f"point columns differ in length: {sorted(sizes)}", index=0)
        bad = first_invalid_point(
            self.x, self.y, self.z, self.intensity, self.return_number, self.num_returns
        )
        if bad is not None:
            raise PointValidationError(bad[1], index=bad[0])

    @classmethod
    def from_points(
        cls, points: Iterable[LidarPoint], source_description: str = ""
    ) -> "PointCloud":
        """Build a cloud from LidarPoint records."""
        points = list(points)
        columns = list(zip(*points)) if points else [()] * 6
        return cls(*columns, source_description=source_description)

    @classmethod
    def empty(cls, source_description: str = "") -> "PointCloud":
        return cls([], [], [], [], [], [], source_description)

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, index: int) -> LidarPoint:
        return LidarPoint(
            float(self.x[index]),
            float(self.y[index]),
            float(self.z[index]),
            int(self.intensity[index]),
            int(self.return_number[index]),
            int(self.num_returns[index]),
        )

    def __iter__(self) -> Iterator[LidarPoint]:
        return (self[i] for i in range(len(self)))

    @property
    def points(self) -> list[LidarPoint]:
        """All returns in record order."""
        return list(self)

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @property
    def bounds(self) -> Optional[BoundingBox]:
        """Tight x/y extent, or None for an empty cloud."""
        if self.is_empty:
            return None
        return compute_bounds(self)

    def take(self, indices: np.ndarray) -> "PointCloud":
        """Sub-cloud holding the given point indices, in the given order."""
        return PointCloud(
            self.x[indices],
            self.y[indices],
            self.z[indices],
            self.intensity[indices],
            self.return_number[indices],
            self.num_returns[indices],
            self.source_description,
        )

    def translated(self, dx: float, dy: float, dz: float = 0.0) -> "PointCloud":
        """Copy with every point shifted by (dx, dy, dz)."""
        return PointCloud(
            self.x + dx,
            self.y + dy,
            self.z + dz,
            self.intensity,
            self.return_number,
            self.num_returns,
            self.source_description,
        )


def compute_bounds(cloud: PointCloud) -> BoundingBox:
    """
    Exact x/y extent of a cloud.

    Args:
        cloud: Non-empty point cloud

    Returns:
        Bounding box touching the extreme points

    Raises:
        EmptyInputError: If the cloud has no points
    """
    if cloud.is_empty:
        raise EmptyInputError("cannot compute the bounds of an empty point cloud")
    return BoundingBox(
        min_x=float(cloud.x.min()),
        min_y=float(cloud.y.min()),
        max_x=float(cloud.x.max()),
        max_y=float(cloud.y.max()),
    )
