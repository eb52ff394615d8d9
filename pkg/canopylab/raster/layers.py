"""
Raster layer types.

All layers hold numpy arrays shaped (height, width) on a GridSpec. Arrays are
copied on construction and marked read-only, so layer values are immutable
and safe to share between threads. Nodata is always carried as a boolean
mask; sentinel values only exist inside file formats.
"""

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..utils import config
from ..utils.errors import BandMismatchError, DimensionMismatchError, InputError
from ..utils.helpers import unique_names
from .grid import GridSpec


def _frozen(array: np.ndarray, dtype, shape: tuple[int, ...], what: str) -> np.ndarray:
    """Copy an array to dtype, check its shape and make it read-only."""
    result = np.array(array, dtype=dtype, copy=True)
    if result.shape != shape:
        raise DimensionMismatchError(f"{what} has shape {result.shape}, expected {shape}")
    result.setflags(write=False)
    return result


@dataclass(frozen=True, eq=False)
class Raster:
    """
    Single-band grid of real values.

    Attributes:
        spec: Grid geometry
        values: float64 array (height, width)
        nodata: bool array, True where the cell carries no measurement
    """

    spec: GridSpec
    values: np.ndarray
    nodata: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        shape = self.spec.shape
        object.__setattr__(self, "values", _frozen(self.values, np.float64, shape, "values"))
        nodata = np.zeros(shape, dtype=bool) if self.nodata is None else self.nodata
        object.__setattr__(self, "nodata", _frozen(nodata, bool, shape, "nodata mask"))

    @property
    def valid(self) -> np.ndarray:
        """True where the cell carries a value."""
        return ~self.nodata


@dataclass(frozen=True, eq=False)
class MultibandRaster:
    """
    Ordered, named bands on one grid.

    Attributes:
        spec: Grid geometry shared by every band
        names: Unique band names, in band order
        values: float64 array (bands, height, width)
        nodata: bool array (bands, height, width)
    """

    spec: GridSpec
    names: tuple[str, ...]
    values: np.ndarray
    nodata: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        names = tuple(self.names)
        if not names:
            raise BandMismatchError("a multiband raster needs at least one band")
        if not unique_names(names):
            raise BandMismatchError(f"band names must be unique, got {names}")
        object.__setattr__(self, "names", names)
        shape = (len(names),) + self.spec.shape
        object.__setattr__(self, "values", _frozen(self.values, np.float64, shape, "band stack"))
        nodata = np.zeros(shape, dtype=bool) if self.nodata is None else self.nodata
        if np.shape(nodata) == self.spec.shape:
            nodata = np.broadcast_to(nodata, shape)
        object.__setattr__(self, "nodata", _frozen(nodata, bool, shape, "nodata stack"))

    @classmethod
    def from_rasters(cls, bands: Iterable[tuple[str, Raster]]) -> "MultibandRaster":
        """
        Stack single-band rasters sharing one grid.

        Args:
            bands: (name, raster) pairs in band order

        Returns:
            The stacked raster

        Raises:
            BandMismatchError: If the rasters do not share a grid
        """
        bands = list(bands)
        if not bands:
            raise BandMismatchError("no bands given")
        spec = bands[0][1].spec
        for name, raster in bands:
            if raster.spec != spec:
                raise BandMismatchError(f"band '{name}' is on a different grid")
        return cls(
            spec=spec,
            names=tuple(name for name, _ in bands),
            values=np.stack([raster.values for _, raster in bands]),
            nodata=np.stack([raster.nodata for _, raster in bands]),
        )

    @property
    def band_count(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        """
        Position of a band.

        Raises:
            BandMismatchError: If no band has that name
        """
        try:
            return self.names.index(name)
        except ValueError:
            raise BandMismatchError(
                f"band '{name}' not found (available: {', '.join(self.names)})"
            ) from None

    def band(self, name: str) -> Raster:
        """Extract one band as a Raster."""
        i = self.index(name)
        return Raster(self.spec, self.values[i], self.nodata[i])

    def select(self, names: Sequence[str]) -> "MultibandRaster":
        """New raster holding only the named bands, in the given order."""
        indices = [self.index(name) for name in names]
        return MultibandRaster(
            self.spec, tuple(names), self.values[indices], self.nodata[indices]
        )

    def require_bands(self, names: Sequence[str]) -> "MultibandRaster":
        """
        Select the named bands, failing with a clear message if any is missing.

        Raises:
            BandMismatchError: If a band is missing
        """
        missing = [name for name in names if name not in self.names]
        if missing:
            raise BandMismatchError(
                f"raster lacks band(s) {', '.join(missing)}; has {', '.join(self.names)}"
            )
        return self.select(names)

    @property
    def pixel_nodata(self) -> np.ndarray:
        """True where any band is nodata."""
        return self.nodata.any(axis=0)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """
    Segmentation map with a validity layer.

    A cell is (valid, tree), (valid, non-tree) or invalid. Invalid cells never
    count as either class.
    """

    spec: GridSpec
    bits: np.ndarray
    valid: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        shape = self.spec.shape
        valid = np.ones(shape, dtype=bool) if self.valid is None else self.valid
        valid = _frozen(valid, bool, shape, "valid mask")
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.shape != shape:
            raise DimensionMismatchError(f"bits has shape {bits.shape}, expected {shape}")
        # invalid cells carry no class
        bits &= valid
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "valid", valid)

    @property
    def tree(self) -> np.ndarray:
        """Valid tree cells."""
        return self.bits & self.valid

    @property
    def non_tree(self) -> np.ndarray:
        """Valid non-tree cells."""
        return ~self.bits & self.valid

    def tree_count(self) -> int:
        return int(np.count_nonzero(self.tree))

    def complement(self) -> "BinaryMask":
        """Swap tree and non-tree on valid cells; invalid cells stay invalid."""
        return BinaryMask(self.spec, ~self.bits & self.valid, self.valid)


@dataclass(frozen=True, eq=False)
class CategoricalRaster:
    """
    Land-cover style raster of small non-negative class ids.

    Attributes:
        spec: Grid geometry
        classes: int32 array of class ids
        class_names: Mapping id -> name
        nodata_id: Id marking cells without a class
    """

    spec: GridSpec
    classes: np.ndarray
    class_names: Mapping[int, str] = field(
        default_factory=lambda: dict(config.LAND_COVER_CLASSES)
    )
    nodata_id: int = config.LAND_COVER_NODATA

    def __post_init__(self) -> None:
        classes = _frozen(self.classes, np.int32, self.spec.shape, "class ids")
        if np.any((classes < 0) & (classes != self.nodata_id)):
            raise InputError("class ids must be non-negative")
        known = set(int(k) for k in self.class_names) | {int(self.nodata_id)}
        present = set(int(v) for v in np.unique(classes))
        unknown = sorted(present - known)
        if unknown:
            raise InputError(f"class id(s) {unknown} not in the class table")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "class_names", dict(self.class_names))

    @property
    def valid(self) -> np.ndarray:
        return self.classes != self.nodata_id


def categorical_to_mask(
    raster: CategoricalRaster, positive_ids: Optional[Sequence[int]] = None
) -> BinaryMask:
    """
    Derive an exact tree mask from a land-cover raster.

    Args:
        raster: Land-cover classes
        positive_ids: Class ids counted as tree (default: Tree Canopy)

    Returns:
        Mask that is tree on positive classes and invalid on nodata
    """
    if positive_ids is None:
        positive_ids = (config.TREE_CANOPY_CLASS,)
    bits = np.isin(raster.classes, np.asarray(list(positive_ids), dtype=np.int32))
    return BinaryMask(raster.spec, bits, raster.valid)
