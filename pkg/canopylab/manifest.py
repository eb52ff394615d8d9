"""
Run manifests.

A manifest is an INI file with one section per stage. Relative paths are
resolved against the manifest's directory. Example::

    [run]
    output_dir = run
    seed = 42

    [rasterize]
    input = cloud_2017.xyz
    cell_size = 0.5
    radius = 0.75

    [label]
    rule = num_returns.max >= 2 && elevation.std >= 1.0

    [train]
    image = naip_2017.cnpy
    year = 2017
    C = 10
    gamma = 1
    samples = 5000

    [predict]
    2011 = naip_2011.cnpy
    2013 = naip_2013.cnpy

    [truth]
    2017 = truth_2017.mask
    2011 = landcover_2011.asc
    tree_classes = 1

    [change]
    aoi.shore = 0,0,64,64

    [overlay]
    alpha = 0.5
    bands = red,green,blue

Only [run], [rasterize], [train] and [predict] are required.
"""

import configparser
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .labels.rules import format_rule, load_rule_file
from .models.svm import TrainConfig
from .raster.grid import Window
from .utils import config
from .utils.errors import CanopyLabError, ManifestError
from .utils.helpers import parse_number_list

logger = logging.getLogger(__name__)

REQUIRED_SECTIONS: tuple[str, ...] = ("run", "rasterize", "train", "predict")
AOI_PREFIX = "aoi."


@dataclass(frozen=True)
class RunManifest:
    """
    Everything one pipeline run needs.

    Attributes:
        output_dir: Directory receiving all artifacts
        seed: Sampling seed
        threads: Worker count, None for the process default
        cloud: Point cloud file (LAS or text) or a saved statistics stack (.cnpy)
        cell_size: Statistics grid cell size in meters
        radius: Sliding circle radius in meters
        rule: Labelling rule text
        train_image: Imagery the noisy labels are drawn on
        train_year: Year of the training imagery
        train: SVM training parameters
        predict: Inference imagery by year, years strictly increasing
        truth: Exact labels by year (.mask files or .asc land cover)
        tree_classes: Land cover ids counted as tree in .asc truth files
        aois: Named areas of interest for change reports
        overlay_alpha: Blend weight of loss overlays
        overlay_bands: Image bands rendered as R, G, B
    """

    output_dir: Path
    cloud: Path
    train_image: Path
    train_year: int
    predict: dict[int, Path]
    seed: int = config.SVM_SEED
    threads: Optional[int] = None
    cell_size: float = config.STATS_CELL_SIZE
    radius: float = config.STATS_RADIUS
    rule: str = config.DEFAULT_TREE_RULE
    train: TrainConfig = field(default_factory=TrainConfig)
    truth: dict[int, Path] = field(default_factory=dict)
    tree_classes: tuple[int, ...] = (config.TREE_CANOPY_CLASS,)
    aois: dict[str, Window] = field(default_factory=dict)
    overlay_alpha: float = config.OVERLAY_ALPHA
    overlay_bands: tuple[str, ...] = config.TRUE_COLOR_BANDS

    def __post_init__(self) -> None:
        years = list(self.predict)
        if not years:
            raise ManifestError("manifest lists no inference year in [predict]")
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ManifestError(f"inference years must be strictly increasing, got {years}")
        if len(self.overlay_bands) != 3:
            raise ManifestError(f"overlay needs three bands, got {list(self.overlay_bands)}")

    @property
    def years(self) -> list[int]:
        return list(self.predict)

    @property
    def year_pairs(self) -> list[tuple[int, int]]:
        """Consecutive (earlier, later) inference years."""
        years = self.years
        return list(zip(years, years[1:]))

    def input_files(self) -> list[Path]:
        """Every file the run reads."""
        return [self.cloud, self.train_image, *self.predict.values(), *self.truth.values()]

    def check_files(self) -> None:
        """
        Verify that every referenced input exists.

        Raises:
            ManifestError: Naming the first missing file
        """
        for path in self.input_files():
            if not path.is_file():
                raise ManifestError(f"manifest references missing file {path}")


# ============================================================================
# READING
# ============================================================================
def _get(parser: configparser.ConfigParser, section: str, key: str, kind=str, default=None):
    if not parser.has_option(section, key):
        if default is None:
            raise ManifestError(f"[{section}] is missing '{key}'")
        return default
    raw = parser.get(section, key)
    try:
        return kind(raw)
    except ValueError:
        raise ManifestError(f"[{section}] {key} = {raw!r} is not a valid {kind.__name__}") from None


def _year(text: str, section: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ManifestError(f"[{section}] key '{text}' is not a year") from None


def _window(text: str, name: str) -> Window:
    try:
        col, row, width, height = parse_number_list(text, 4)
    except ValueError as e:
        raise ManifestError(f"[change] {AOI_PREFIX}{name}: {e}") from None
    if any(int(v) != v for v in (col, row, width, height)):
        raise ManifestError(f"[change] {AOI_PREFIX}{name} must hold whole cell counts")
    return Window(int(col), int(row), int(width), int(height))


def read_manifest(path: Union[str, Path]) -> RunManifest:
    """
    Parse a manifest file.

    Args:
        path: INI file

    Returns:
        RunManifest with absolute paths

    Raises:
        ManifestError: Missing sections or keys, bad values, unordered years
    """
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except (OSError, configparser.Error) as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e

    missing = [name for name in REQUIRED_SECTIONS if not parser.has_section(name)]
    if missing:
        raise ManifestError(f"manifest {path} lacks section(s) {', '.join(missing)}")

    base = path.resolve().parent

    def resolve(text: str) -> Path:
        candidate = Path(text).expanduser()
        return candidate if candidate.is_absolute() else base / candidate

    truth: dict[int, Path] = {}
    tree_classes: tuple[int, ...] = (config.TREE_CANOPY_CLASS,)
    if parser.has_section("truth"):
        for key, value in parser.items("truth"):
            if key == "tree_classes":
                try:
                    tree_classes = tuple(int(v) for v in parse_number_list(value))
                except ValueError as e:
                    raise ManifestError(f"[truth] tree_classes: {e}") from None
            else:
                truth[_year(key, "truth")] = resolve(value)

    aois: dict[str, Window] = {}
    if parser.has_section("change"):
        for key, value in parser.items("change"):
            if not key.startswith(AOI_PREFIX):
                raise ManifestError(f"[change] unknown key '{key}'")
            aois[key[len(AOI_PREFIX):]] = _window(value, key[len(AOI_PREFIX):])

    rule = config.DEFAULT_TREE_RULE
    if parser.has_section("label"):
        if parser.has_option("label", "rule_file"):
            rule_path = resolve(parser.get("label", "rule_file"))
            rule = format_rule(load_rule_file(rule_path))
        elif parser.has_option("label", "rule"):
            rule = parser.get("label", "rule")

    overlay_alpha = config.OVERLAY_ALPHA
    overlay_bands = config.TRUE_COLOR_BANDS
    if parser.has_section("overlay"):
        overlay_alpha = _get(parser, "overlay", "alpha", float, config.OVERLAY_ALPHA)
        bands = parser.get("overlay", "bands", fallback="")
        if bands:
            overlay_bands = tuple(b.strip() for b in bands.split(",") if b.strip())

    threads_text = parser.get("run", "threads", fallback="")
    default_output = config.DEFAULT_OUTPUT_DIR
    seed = _get(parser, "run", "seed", int, config.SVM_SEED)
    try:
        train = TrainConfig(
            C=_get(parser, "train", "c", float, config.SVM_C),
            gamma=_get(parser, "train", "gamma", float, config.SVM_GAMMA),
            tol=_get(parser, "train", "tol", float, config.SVM_TOL),
            max_passes=_get(parser, "train", "max_passes", int, config.SVM_MAX_PASSES),
            sample_count=_get(parser, "train", "samples", int, config.SVM_SAMPLES_PER_CLASS),
            seed=seed,
        )
        manifest = RunManifest(
            output_dir=resolve(_get(parser, "run", "output_dir", str, str(default_output))),
            cloud=resolve(_get(parser, "rasterize", "input")),
            train_image=resolve(_get(parser, "train", "image")),
            train_year=_get(parser, "train", "year", int),
            predict={_year(k, "predict"): resolve(v) for k, v in parser.items("predict")},
            seed=seed,
            threads=int(threads_text) if threads_text else None,
            cell_size=_get(parser, "rasterize", "cell_size", float, config.STATS_CELL_SIZE),
            radius=_get(parser, "rasterize", "radius", float, config.STATS_RADIUS),
            rule=rule,
            train=train,
            truth=truth,
            tree_classes=tree_classes,
            aois=aois,
            overlay_alpha=overlay_alpha,
            overlay_bands=overlay_bands,
        )
    except ManifestError:
        raise
    except (CanopyLabError, ValueError) as e:
        raise ManifestError(f"manifest {path}: {e}") from e
    logger.info(f"Read manifest {path}: years {manifest.years}, {len(aois)} AOI(s)")
    return manifest


# ============================================================================
# WRITING
# ============================================================================
def format_manifest(manifest: RunManifest, relative_to: Optional[Path] = None) -> str:
    """
    Render a manifest as INI text.

    Args:
        manifest: Manifest to write
        relative_to: Directory paths are written relative to, when they lie below it

    Returns:
        INI text that read_manifest parses back into an equal manifest
    """

    def show(path: Path) -> str:
        if relative_to is not None:
            try:
                return str(Path(path).resolve().relative_to(Path(relative_to).resolve()))
            except ValueError:
                pass
        return str(path)

    parser = configparser.ConfigParser(interpolation=None)
    parser["run"] = {"output_dir": show(manifest.output_dir), "seed": str(manifest.seed)}
    if manifest.threads is not None:
        parser["run"]["threads"] = str(manifest.threads)
    parser["rasterize"] = {
        "input": show(manifest.cloud),
        "cell_size": repr(manifest.cell_size),
        "radius": repr(manifest.radius),
    }
    parser["label"] = {"rule": manifest.rule}
    parser["train"] = {
        "image": show(manifest.train_image),
        "year": str(manifest.train_year),
        "c": repr(manifest.train.C),
        "gamma": repr(manifest.train.gamma),
        "tol": repr(manifest.train.tol),
        "max_passes": str(manifest.train.max_passes),
        "samples": str(manifest.train.sample_count),
    }
    parser["predict"] = {str(year): show(p) for year, p in manifest.predict.items()}
    if manifest.truth:
        parser["truth"] = {str(year): show(p) for year, p in manifest.truth.items()}
        parser["truth"]["tree_classes"] = ",".join(str(c) for c in manifest.tree_classes)
    if manifest.aois:
        parser["change"] = {
            f"{AOI_PREFIX}{name}": f"{w.col_off},{w.row_off},{w.width},{w.height}"
            for name, w in manifest.aois.items()
        }
    parser["overlay"] = {
        "alpha": repr(manifest.overlay_alpha),
        "bands": ",".join(manifest.overlay_bands),
    }
    lines: list[str] = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in parser.items(section))
        lines.append("")
    return "\n".join(lines)
