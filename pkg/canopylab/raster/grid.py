"""
Grid geometry.

A GridSpec places a row-major grid of square cells on the projected plane.
Row 0 is the northern edge and rows grow southward. Cell (r, c) covers
x in [x0 + c*s, x0 + (c+1)*s) and y in (y0 - (r+1)*s, y0 - r*s].
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..utils import config
from ..utils.errors import AoiError, ParameterError


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned extent in meters."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y


@dataclass(frozen=True)
class Window:
    """Rectangular sub-grid (area of interest) in cell units."""

    col_off: int
    row_off: int
    width: int
    height: int

    def as_dict(self) -> dict:
        return {
            "col_off": self.col_off,
            "row_off": self.row_off,
            "width": self.width,
            "height": self.height,
        }


@dataclass(frozen=True)
class GridSpec:
    """
    Geo-referenced grid geometry.

    Attributes:
        origin_x: Easting of the top-left corner of cell (0, 0)
        origin_y: Northing of the top-left corner of cell (0, 0)
        cell_size: Cell edge length in meters
        width: Number of columns
        height: Number of rows
    """

    origin_x: float
    origin_y: float
    cell_size: float
    width: int
    height: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.cell_size) and self.cell_size > 0):
            raise ParameterError(f"cell_size must be positive, got {self.cell_size}")
        if int(self.width) != self.width or self.width < 1:
            raise ParameterError(f"width must be a positive integer, got {self.width}")
        if int(self.height) != self.height or self.height < 1:
            raise ParameterError(f"height must be a positive integer, got {self.height}")
        if not (math.isfinite(self.origin_x) and math.isfinite(self.origin_y)):
            raise ParameterError("grid origin must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        """(height, width), the numpy array shape of a layer on this grid."""
        return (self.height, self.width)

    @property
    def bounds(self) -> BoundingBox:
        """Outer extent of the grid."""
        return BoundingBox(
            min_x=self.origin_x,
            min_y=self.origin_y - self.height * self.cell_size,
            max_x=self.origin_x + self.width * self.cell_size,
            max_y=self.origin_y,
        )

    def overlaps(self, other: "GridSpec") -> bool:
        """True if the two extents share an area larger than zero."""
        a, b = self.bounds, other.bounds
        eps = config.GRID_EPSILON
        return (
            min(a.max_x, b.max_x) - max(a.min_x, b.min_x) > eps
            and min(a.max_y, b.max_y) - max(a.min_y, b.min_y) > eps
        )

    def check_window(self, window: Window) -> Window:
        """
        Validate that a window lies inside this grid.

        Args:
            window: Area of interest in cell units

        Returns:
            The same window

        Raises:
            AoiError: If the window is empty or leaves the grid
        """
        if window.width < 1 or window.height < 1:
            raise AoiError(f"AOI must be non-empty, got {window}")
        if (
            window.col_off < 0
            or window.row_off < 0
            or window.col_off + window.width > self.width
            or window.row_off + window.height > self.height
        ):
            raise AoiError(
                f"AOI {window.as_dict()} lies outside the {self.width}x{self.height} grid"
            )
        return window

    @classmethod
    def from_bounds(cls, bounds: BoundingBox, cell_size: float) -> "GridSpec":
        """
        Smallest grid anchored at the box's top-left corner that covers the box.

        Args:
            bounds: Extent to cover
            cell_size: Cell edge length in meters

        Returns:
            A grid with at least one cell
        """
        width = max(1, math.ceil(bounds.width / cell_size))
        height = max(1, math.ceil(bounds.height / cell_size))
        # points on the max-x or min-y edge fall on an open boundary
        if bounds.min_x + width * cell_size <= bounds.max_x:
            width += 1
        if bounds.max_y - height * cell_size >= bounds.min_y:
            height += 1
        return cls(bounds.min_x, bounds.max_y, cell_size, width, height)


def cell_of(spec: GridSpec, x: float, y: float) -> Optional[tuple[int, int]]:
    """
    Find the cell containing a point.

    Args:
        spec: Grid geometry
        x: Easting in meters
        y: Northing in meters

    Returns:
        (row, col), or None when the point lies outside the grid
    """
    col = math.floor((x - spec.origin_x) / spec.cell_size)
    row = math.floor((spec.origin_y - y) / spec.cell_size)
    if 0 <= row < spec.height and 0 <= col < spec.width:
        return (row, col)
    return None


def cells_of(
    spec: GridSpec, xs: np.ndarray, ys: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorised cell_of.

    Args:
        spec: Grid geometry
        xs: Eastings
        ys: Northings (same shape as xs)

    Returns:
        Tuple of (rows, cols, inside); rows and cols are only meaningful
        where inside is True
    """
    cols = np.floor((np.asarray(xs, dtype=np.float64) - spec.origin_x) / spec.cell_size)
    rows = np.floor((spec.origin_y - np.asarray(ys, dtype=np.float64)) / spec.cell_size)
    inside = (rows >= 0) & (rows < spec.height) & (cols >= 0) & (cols < spec.width)
    rows = np.where(inside, rows, 0).astype(np.int64)
    cols = np.where(inside, cols, 0).astype(np.int64)
    return rows, cols, inside


def center_of(spec: GridSpec, row: int, col: int) -> tuple[float, float]:
    """
    Coordinates of a cell center.

    Args:
        spec: Grid geometry
        row: Row index
        col: Column index

    Returns:
        (x, y) in meters

    Raises:
        IndexError: If (row, col) is outside the grid
    """
    if not (0 <= row < spec.height and 0 <= col < spec.width):
        raise IndexError(
            f"cell ({row}, {col}) outside the {spec.height}x{spec.width} grid"
        )
    return (
        spec.origin_x + (col + 0.5) * spec.cell_size,
        spec.origin_y - (row + 0.5) * spec.cell_size,
    )


def cell_centers(
    spec: GridSpec, row_start: int = 0, row_stop: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Center coordinates of every cell in a band of rows.

    Args:
        spec: Grid geometry
        row_start: First row (inclusive)
        row_stop: Last row (exclusive); defaults to the grid height

    Returns:
        Tuple of (xs, ys), each shaped (rows, width)
    """
    if row_stop is None:
        row_stop = spec.height
    cols = np.arange(spec.width, dtype=np.float64)
    rows = np.arange(row_start, row_stop, dtype=np.float64)
    xs = spec.origin_x + (cols + 0.5) * spec.cell_size
    ys = spec.origin_y - (rows + 0.5) * spec.cell_size
    return np.broadcast_to(xs, (len(rows), spec.width)), np.broadcast_to(
        ys[:, None], (len(rows), spec.width)
    )
