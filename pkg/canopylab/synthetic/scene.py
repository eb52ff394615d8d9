"""
Synthetic urban scene generator.

A square scene holds flat-roofed buildings and round tree clusters on flat
ground. LiDAR pulses over trees split into several returns spread through the
canopy, pulses over roofs return once (except near roof edges, where a pulse
can hit both roof and ground), and ground pulses return once at ground level.
Four-band imagery paints each class with its own spectral mean plus Gaussian
noise. Later epochs remove a fraction of the tree clusters, like a storm.

Buildings are placed first, then trees, each rejecting positions that come
closer than a gap to anything already placed.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..lidar.pointcloud import PointCloud
from ..raster.grid import GridSpec, cell_centers
from ..raster.layers import BinaryMask, MultibandRaster
from ..utils import config
from ..utils.errors import SceneSpecError

logger = logging.getLogger(__name__)

CLASS_NAMES: tuple[str, str, str] = ("ground", "building", "tree")
_GROUND, _BUILDING, _TREE = 0, 1, 2


@dataclass(frozen=True)
class TreeCluster:
    """Round canopy footprint."""

    x: float
    y: float
    radius: float
    height: float  # canopy top above ground

    def contains(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (xs - self.x) ** 2 + (ys - self.y) ** 2 <= self.radius**2


@dataclass(frozen=True)
class Building:
    """Axis-aligned flat roof covering [min_x, min_x + width) x [min_y, min_y + depth)."""

    min_x: float
    min_y: float
    width: float
    depth: float
    height: float  # roof above ground

    def contains(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return (
            (xs >= self.min_x)
            & (xs < self.min_x + self.width)
            & (ys >= self.min_y)
            & (ys < self.min_y + self.depth)
        )

    def edge_distance(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Distance from points inside the roof to its nearest edge."""
        return np.minimum.reduce(
            [
                xs - self.min_x,
                self.min_x + self.width - xs,
                ys - self.min_y,
                self.min_y + self.depth - ys,
            ]
        )

    def distance_to(self, x: float, y: float) -> float:
        """Euclidean distance from a point to the footprint (0 inside)."""
        dx = max(self.min_x - x, 0.0, x - (self.min_x + self.width))
        dy = max(self.min_y - y, 0.0, y - (self.min_y + self.depth))
        return math.hypot(dx, dy)


@dataclass(frozen=True)
class SyntheticSceneSpec:
    """
    Parameters of a synthetic scene.

    Explicit trees or buildings replace the random placement of that class.
    The scene spans [0, size_m] in x and y; removal_fractions lists, for each
    epoch after the first, the share of the previous epoch's tree pixels to
    remove.
    """

    size_m: float = config.SYNTH_SIZE_M
    stats_cell_size: float = config.STATS_CELL_SIZE
    image_cell_size: float = config.IMAGE_CELL_SIZE
    point_density: float = config.SYNTH_POINT_DENSITY
    ground_z: float = config.SYNTH_GROUND_Z
    tree_count: int = config.SYNTH_TREE_COUNT
    tree_radius: tuple[float, float] = config.SYNTH_TREE_RADIUS
    canopy_height: tuple[float, float] = config.SYNTH_CANOPY_HEIGHT
    canopy_z_spread: float = config.SYNTH_CANOPY_Z_SPREAD
    multi_return_prob: float = config.SYNTH_MULTI_RETURN_PROB
    building_count: int = config.SYNTH_BUILDING_COUNT
    building_size: tuple[float, float] = config.SYNTH_BUILDING_SIZE
    building_height: tuple[float, float] = config.SYNTH_BUILDING_HEIGHT
    edge_band: float = config.SYNTH_EDGE_BAND
    edge_multi_return_prob: float = config.SYNTH_EDGE_MULTI_RETURN_PROB
    spectra: dict[str, tuple[float, float, float, float]] = field(
        default_factory=lambda: dict(config.SYNTH_SPECTRA)
    )
    noise_sigma: float = config.SYNTH_NOISE_SIGMA
    removal_fractions: tuple[float, ...] = ()
    trees: Optional[tuple[TreeCluster, ...]] = None
    buildings: Optional[tuple[Building, ...]] = None
    seed: int = config.SVM_SEED

    def __post_init__(self) -> None:
        positive = {
            "size_m": self.size_m,
            "stats_cell_size": self.stats_cell_size,
            "image_cell_size": self.image_cell_size,
            "point_density": self.point_density,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0):
                raise SceneSpecError(f"{name} must be positive, got {value}")
        for name in ("multi_return_prob", "edge_multi_return_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise SceneSpecError(f"{name} must lie in [0, 1]")
        if self.tree_count < 0 or self.building_count < 0:
            raise SceneSpecError("object counts must be non-negative")
        if any(not 0.0 <= f <= 1.0 for f in self.removal_fractions):
            raise SceneSpecError(
                f"removal fractions must lie in [0, 1], got {self.removal_fractions}"
            )
        for low, high, name in (
            (*self.tree_radius, "tree_radius"),
            (*self.canopy_height, "canopy_height"),
            (*self.building_size, "building_size"),
            (*self.building_height, "building_height"),
        ):
            if not 0 < low <= high:
                raise SceneSpecError(f"{name} range ({low}, {high}) is invalid")
        if set(self.spectra) != set(CLASS_NAMES):
            raise SceneSpecError(f"spectra must cover exactly {CLASS_NAMES}")
        means = [tuple(self.spectra[name]) for name in CLASS_NAMES]
        if any(len(m) != len(config.IMAGE_BANDS) for m in means):
            raise SceneSpecError(f"each spectrum needs {len(config.IMAGE_BANDS)} band means")
        if len(set(means)) != len(means):
            raise SceneSpecError("class spectra must be distinct")

    @property
    def epoch_count(self) -> int:
        return 1 + len(self.removal_fractions)

    @property
    def stats_grid(self) -> GridSpec:
        n = math.ceil(self.size_m / self.stats_cell_size)
        return GridSpec(0.0, self.size_m, self.stats_cell_size, n, n)

    @property
    def image_grid(self) -> GridSpec:
        n = math.ceil(self.size_m / self.image_cell_size)
        return GridSpec(0.0, self.size_m, self.image_cell_size, n, n)


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    """
    A generated scene.

    Attributes:
        spec: Parameters used
        cloud: LiDAR survey of the first epoch
        images: Imagery per epoch on spec.image_grid
        truths: Exact tree masks per epoch on spec.image_grid
        trees: Tree clusters of the first epoch
        buildings: Buildings (unchanged across epochs)
        present: Indices into trees still standing, per epoch
    """

    spec: SyntheticSceneSpec
    cloud: PointCloud
    images: tuple[MultibandRaster, ...]
    truths: tuple[BinaryMask, ...]
    trees: tuple[TreeCluster, ...]
    buildings: tuple[Building, ...]
    present: tuple[tuple[int, ...], ...]


# ============================================================================
# PLACEMENT
# ============================================================================
def _clear_of(
    x: float,
    y: float,
    reach: float,
    trees: list[TreeCluster],
    buildings: list[Building],
    gap: float,
) -> bool:
    """True if a footprint of the given reach around (x, y) keeps the gap to all others."""
    for tree in trees:
        if math.hypot(x - tree.x, y - tree.y) < reach + tree.radius + gap:
            return False
    for building in buildings:
        if building.distance_to(x, y) < reach + gap:
            return False
    return True


def _check_explicit(trees: tuple[TreeCluster, ...], buildings: tuple[Building, ...]) -> None:
    for i, tree in enumerate(trees):
        if not _clear_of(tree.x, tree.y, tree.radius, list(trees[:i]), list(buildings), 0.0):
            raise SceneSpecError(
                f"tree cluster {i} at ({tree.x}, {tree.y}) overlaps another footprint"
            )
    for i, a in enumerate(buildings):
        for j, b in enumerate(buildings[:i]):
            if (
                a.min_x < b.min_x + b.width
                and b.min_x < a.min_x + a.width
                and a.min_y < b.min_y + b.depth
                and b.min_y < a.min_y + a.depth
            ):
                raise SceneSpecError(f"buildings {j} and {i} overlap")


def _place_buildings(spec: SyntheticSceneSpec, rng: np.random.Generator) -> list[Building]:
    placed: list[Building] = []
    gap = config.SYNTH_FOOTPRINT_GAP
    for index in range(spec.building_count):
        for _ in range(config.SYNTH_PLACEMENT_ATTEMPTS):
            width, depth = rng.uniform(*spec.building_size, size=2)
            if width >= spec.size_m or depth >= spec.size_m:
                raise SceneSpecError("buildings do not fit into the scene")
            min_x = rng.uniform(0.0, spec.size_m - width)
            min_y = rng.uniform(0.0, spec.size_m - depth)
            height = rng.uniform(*spec.building_height)
            candidate = Building(min_x, min_y, width, depth, height)
            if all(
                candidate.min_x - gap >= b.min_x + b.width
                or b.min_x - gap >= candidate.min_x + candidate.width
                or candidate.min_y - gap >= b.min_y + b.depth
                or b.min_y - gap >= candidate.min_y + candidate.depth
                for b in placed
            ):
                placed.append(candidate)
                break
        else:
            raise SceneSpecError(f"could not place building {index}; the scene is too crowded")
    return placed


def _place_trees(
    spec: SyntheticSceneSpec, rng: np.random.Generator, buildings: list[Building]
) -> list[TreeCluster]:
    placed: list[TreeCluster] = []
    for index in range(spec.tree_count):
        for _ in range(config.SYNTH_PLACEMENT_ATTEMPTS):
            radius = rng.uniform(*spec.tree_radius)
            if 2 * radius >= spec.size_m:
                raise SceneSpecError("tree clusters do not fit into the scene")
            x, y = rng.uniform(radius, spec.size_m - radius, size=2)
            height = rng.uniform(*spec.canopy_height)
            if _clear_of(x, y, radius, placed, buildings, config.SYNTH_FOOTPRINT_GAP):
                placed.append(TreeCluster(x, y, radius, height))
                break
        else:
            raise SceneSpecError(f"could not place tree cluster {index}; the scene is too crowded")
    return placed


# ============================================================================
# LIDAR
# ============================================================================
def _classify(
    xs: np.ndarray, ys: np.ndarray, trees: list[TreeCluster], buildings: list[Building]
) -> tuple[np.ndarray, np.ndarray]:
    """Class id and owning object index for every location."""
    classes = np.full(xs.shape, _GROUND, dtype=np.int8)
    owner = np.full(xs.shape, -1, dtype=np.int64)
    for i, building in enumerate(buildings):
        inside = building.contains(xs, ys)
        classes[inside] = _BUILDING
        owner[inside] = i
    for i, tree in enumerate(trees):
        inside = tree.contains(xs, ys)
        classes[inside] = _TREE
        owner[inside] = i
    return classes, owner


def _intensities(rng: np.random.Generator, class_name: str, count: int) -> np.ndarray:
    mean, sigma = config.SYNTH_INTENSITY[class_name]
    return np.clip(np.rint(rng.normal(mean, sigma, count)), 0, 65535).astype(np.int64)


def _simulate_lidar(
    spec: SyntheticSceneSpec,
    rng: np.random.Generator,
    trees: list[TreeCluster],
    buildings: list[Building],
) -> PointCloud:
    pulses = int(round(spec.point_density * spec.size_m**2))
    px = rng.uniform(0.0, spec.size_m, pulses)
    # y in (0, size] so every pulse lies inside the top-left anchored grid
    py = spec.size_m - rng.uniform(0.0, spec.size_m, pulses)
    classes, owner = _classify(px, py, trees, buildings)

    # returns per pulse
    returns = np.ones(pulses, dtype=np.int64)
    canopy = classes == _TREE
    multi = canopy & (rng.random(pulses) < spec.multi_return_prob)
    returns[multi] = rng.integers(2, config.SYNTH_MAX_RETURNS + 1, size=int(multi.sum()))
    edge = np.zeros(pulses, dtype=bool)
    for i, building in enumerate(buildings):
        on_roof = owner == i
        on_roof &= classes == _BUILDING
        edge |= on_roof & (building.edge_distance(px, py) < spec.edge_band)
    edge_split = edge & (rng.random(pulses) < spec.edge_multi_return_prob)
    returns[edge_split] = 2

    pulse_of = np.repeat(np.arange(pulses), returns)
    first = np.r_[0, np.cumsum(returns)[:-1]]
    return_number = np.arange(len(pulse_of)) - np.repeat(first, returns) + 1
    num_returns = returns[pulse_of]
    point_class = classes[pulse_of]
    z = np.full(len(pulse_of), spec.ground_z)

    # canopy returns fall below the crown top, ordered top-down within a pulse
    tree_points = np.flatnonzero(point_class == _TREE)
    heights = np.array([t.height for t in trees] or [0.0])
    tops = spec.ground_z + heights[owner[pulse_of[tree_points]]]
    depth = rng.uniform(0.0, spec.canopy_z_spread, len(tree_points))
    order = np.lexsort((depth, pulse_of[tree_points]))
    z[tree_points] = tops - depth[order]
    last = (return_number == num_returns) & (num_returns > 1) & (point_class == _TREE)
    z[last & (rng.random(len(z)) < config.SYNTH_GROUND_HIT_PROB)] = spec.ground_z

    # roof returns; the second return of an edge pulse reaches the ground
    roof_points = np.flatnonzero((point_class == _BUILDING) & (return_number == 1))
    roofs = np.array([b.height for b in buildings] or [0.0])
    z[roof_points] = spec.ground_z + roofs[owner[pulse_of[roof_points]]]

    intensity = np.zeros(len(z), dtype=np.int64)
    for class_id, name in enumerate(CLASS_NAMES):
        members = np.flatnonzero(point_class == class_id)
        intensity[members] = _intensities(rng, name, len(members))

    cloud = PointCloud(
        px[pulse_of], py[pulse_of], z, intensity, return_number, num_returns,
        source_description=f"synthetic scene seed {spec.seed}",
    )
    logger.info(
        f"Simulated {pulses} pulses / {len(cloud)} returns "
        f"({int(multi.sum())} multi-return canopy pulses, "
        f"{int(edge_split.sum())} split at roof edges)"
    )
    return cloud


# ============================================================================
# IMAGERY
# ============================================================================
def _paint_image(
    spec: SyntheticSceneSpec,
    rng: np.random.Generator,
    trees: list[TreeCluster],
    buildings: list[Building],
) -> tuple[MultibandRaster, BinaryMask]:
    grid = spec.image_grid
    xs, ys = cell_centers(grid)
    classes, _ = _classify(xs, ys, trees, buildings)
    means = np.array([spec.spectra[name] for name in CLASS_NAMES], dtype=np.float64)
    pixels = means[classes] + rng.normal(0.0, spec.noise_sigma, classes.shape + (means.shape[1],))
    pixels = np.clip(np.rint(pixels), 0.0, 255.0)
    image = MultibandRaster(grid, config.IMAGE_BANDS, np.moveaxis(pixels, -1, 0))
    return image, BinaryMask(grid, classes == _TREE)


def _tree_pixels(spec: SyntheticSceneSpec, trees: list[TreeCluster]) -> np.ndarray:
    xs, ys = cell_centers(spec.image_grid)
    return np.array([int(np.count_nonzero(t.contains(xs, ys))) for t in trees], dtype=np.int64)


def _remove_clusters(
    present: list[int], pixels: np.ndarray, fraction: float, rng: np.random.Generator
) -> list[int]:
    """Drop a random set of clusters whose pixel share comes closest to fraction."""
    if not present or fraction == 0.0:
        return list(present)
    order = rng.permutation(present)
    total = pixels[present].sum()
    removed = np.r_[0, np.cumsum(pixels[order])]
    count = int(np.argmin(np.abs(removed - fraction * total)))
    gone = set(int(i) for i in order[:count])
    return [i for i in present if i not in gone]


def generate_synthetic_scene(spec: Optional[SyntheticSceneSpec] = None) -> SyntheticScene:
    """
    Generate a LiDAR survey, per-epoch imagery and per-epoch truth masks.

    Args:
        spec: Scene parameters (defaults from config)

    Returns:
        The scene; identical for identical specs

    Raises:
        SceneSpecError: Explicit footprints overlap or random placement fails
    """
    spec = spec or SyntheticSceneSpec()
    rng = np.random.default_rng(spec.seed)

    if spec.buildings is not None:
        buildings = list(spec.buildings)
    else:
        buildings = _place_buildings(spec, rng)
    if spec.trees is not None:
        trees = list(spec.trees)
    else:
        trees = _place_trees(spec, rng, buildings)
    _check_explicit(tuple(trees), tuple(buildings))

    cloud = _simulate_lidar(spec, rng, trees, buildings)
    pixels = _tree_pixels(spec, trees)

    present = list(range(len(trees)))
    epochs, images, truths = [], [], []
    for epoch in range(spec.epoch_count):
        if epoch > 0:
            present = _remove_clusters(present, pixels, spec.removal_fractions[epoch - 1], rng)
        image, truth = _paint_image(spec, rng, [trees[i] for i in present], buildings)
        epochs.append(tuple(present))
        images.append(image)
        truths.append(truth)
        logger.debug(f"Epoch {epoch}: {len(present)} tree clusters, {truth.tree_count()} tree px")

    logger.info(
        f"Generated synthetic scene (seed {spec.seed}): {len(trees)} tree clusters, "
        f"{len(buildings)} buildings, {spec.epoch_count} epoch(s)"
    )
    return SyntheticScene(
        spec=spec,
        cloud=cloud,
        images=tuple(images),
        truths=tuple(truths),
        trees=tuple(trees),
        buildings=tuple(buildings),
        present=tuple(epochs),
    )
