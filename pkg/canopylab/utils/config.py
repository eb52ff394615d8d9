"""
Pipeline configuration constants.

All defaults and tunable parameters are defined here. The CLI overrides a
few of them at start-up (threads, verbosity); library functions read them
at call time whenever an argument is left as None.
"""

from pathlib import Path

# ============================================================================
# GRID SETTINGS
# ============================================================================
STATS_CELL_SIZE: float = 0.5  # meters, LiDAR statistics raster
IMAGE_CELL_SIZE: float = 1.0  # meters, orthophoto raster
GRID_EPSILON: float = 1e-9  # slack for extent overlap tests

# ============================================================================
# LIDAR STATISTICS
# ============================================================================
STATS_RADIUS: float = 0.75  # meters, sliding circle of 1.5 m diameter
STATS_QUANTITIES: tuple[str, ...] = ("elevation", "num_returns", "intensity")
STATS_STATISTICS: tuple[str, ...] = ("min", "max", "mean", "std")
COUNT_BAND: str = "count"

# ============================================================================
# RULE LABELING
# ============================================================================
DEFAULT_MIN_MAX_RETURNS: float = 2.0
DEFAULT_MIN_ELEVATION_STD: float = 1.0  # meters
DEFAULT_TREE_RULE: str = (
    f"num_returns.max >= {DEFAULT_MIN_MAX_RETURNS:g} "
    f"&& elevation.std >= {DEFAULT_MIN_ELEVATION_STD:.1f}"
)

# ============================================================================
# IMAGERY
# ============================================================================
IMAGE_BANDS: tuple[str, ...] = ("nir", "red", "green", "blue")
TRUE_COLOR_BANDS: tuple[str, ...] = ("red", "green", "blue")
FEATURE_SCALE: float = 255.0  # features are band value / 255

# ============================================================================
# SVM SETTINGS
# ============================================================================
SVM_C: float = 10.0
SVM_GAMMA: float = 1.0
SVM_TOL: float = 1e-3
SVM_MAX_PASSES: int = 5
SVM_SAMPLES_PER_CLASS: int = 5000
SVM_SEED: int = 42
SVM_MAX_SWEEPS: int = 10_000  # hard cap on outer SMO sweeps
SVM_ALPHA_EPSILON: float = 1e-8  # alphas this close to a bound snap onto it
SVM_STEP_EPSILON: float = 1e-12  # minimum alpha progress counted as a step
SVM_KERNEL_CACHE_ROWS: int = 512  # kernel rows kept during training
PREDICT_CHUNK_PIXELS: int = 512

# ============================================================================
# LAND COVER
# ============================================================================
LAND_COVER_CLASSES: dict[int, str] = {
    1: "Tree Canopy",
    2: "Grass/Shrub",
    3: "Bare Soil",
    4: "Water",
    5: "Buildings",
    6: "Roads",
    7: "Other Impervious",
    8: "Railroads",
}
LAND_COVER_NODATA: int = 0
TREE_CANOPY_CLASS: int = 1

# ============================================================================
# RENDERING
# ============================================================================
OVERLAY_ALPHA: float = 0.5
OVERLAY_COLOR: tuple[int, int, int] = (255, 0, 0)
IMAGE_VALUE_RANGE: tuple[float, float] = (0.0, 255.0)
MASK_TREE_COLOR: tuple[int, int, int] = (34, 100, 34)
MASK_OTHER_COLOR: tuple[int, int, int] = (240, 220, 120)
MASK_INVALID_COLOR: tuple[int, int, int] = (0, 0, 0)
NODATA_PIXEL: int = 0

# ============================================================================
# FILE FORMATS
# ============================================================================
ASCII_NODATA_VALUE: float = -9999.0
ASCII_PRECISION: int = 6  # significant digits
CONTAINER_MAGIC: bytes = b"CNPY"
CONTAINER_VERSION: int = 1
MODEL_MAGIC: bytes = b"CSVM"
MODEL_VERSION: int = 1
MASK_BAND_NAME: str = "mask"
TEXT_COMMENT_PREFIX: str = "#"

# ============================================================================
# SYNTHETIC SCENE
# ============================================================================
SYNTH_SIZE_M: float = 128.0  # 256 x 256 statistics cells at 0.5 m
SYNTH_POINT_DENSITY: float = 10.0  # pulses per square meter
SYNTH_GROUND_Z: float = 2.0
SYNTH_TREE_COUNT: int = 20
SYNTH_TREE_RADIUS: tuple[float, float] = (5.0, 8.0)
SYNTH_CANOPY_HEIGHT: tuple[float, float] = (8.0, 16.0)  # above ground
SYNTH_CANOPY_Z_SPREAD: float = 4.0
SYNTH_MULTI_RETURN_PROB: float = 0.7
SYNTH_MAX_RETURNS: int = 4
SYNTH_GROUND_HIT_PROB: float = 0.5  # last return of a canopy pulse reaches the ground
SYNTH_BUILDING_COUNT: int = 6
SYNTH_BUILDING_SIZE: tuple[float, float] = (8.0, 16.0)
SYNTH_BUILDING_HEIGHT: tuple[float, float] = (6.0, 25.0)
SYNTH_EDGE_BAND: float = 0.3  # meters around a roof edge
SYNTH_EDGE_MULTI_RETURN_PROB: float = 0.1
SYNTH_FOOTPRINT_GAP: float = 1.5  # min spacing between trees and buildings
SYNTH_NOISE_SIGMA: float = 8.0  # spectral noise, 0-255 units
SYNTH_INTENSITY: dict[str, tuple[float, float]] = {
    # mean, standard deviation
    "tree": (80.0, 30.0),
    "building": (200.0, 20.0),
    "ground": (150.0, 20.0),
}
SYNTH_PLACEMENT_ATTEMPTS: int = 200
SYNTH_SPECTRA: dict[str, tuple[float, float, float, float]] = {
    # NIR, R, G, B
    "tree": (170.0, 60.0, 95.0, 60.0),
    "building": (120.0, 150.0, 150.0, 160.0),
    "ground": (100.0, 130.0, 120.0, 105.0),
}
SYNTH_YEARS: tuple[int, ...] = (2011, 2013, 2015)
SYNTH_TRAIN_YEAR: int = 2017
SYNTH_REMOVAL_FRACTIONS: tuple[float, ...] = (0.14, 0.05)
SYNTH_INFERENCE_SEED_OFFSET: int = 1000  # inference scene seed = training seed + offset
SYNTH_TRAIN_SAMPLES: int = 1000  # per class, written into generated manifests

# ============================================================================
# PIPELINE
# ============================================================================
RUN_INDEX_FILE: str = "index.json"
RUN_SUMMARY_FILE: str = "summary.json"
FAILURE_MARKER_FILE: str = "FAILED"
DEFAULT_OUTPUT_DIR: Path = Path("canopylab_run")

# ============================================================================
# PARALLELISM AND DEBUG
# ============================================================================
THREADS: int = 0  # 0 = one worker per CPU
VERBOSE: bool = False
