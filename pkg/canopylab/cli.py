"""
Command-line interface.

Usage:
    canopylab [--threads N] [--verbose] <command> ...

Commands:
    rasterize   point cloud -> statistics stack (.cnpy)
    label       statistics stack + rule -> noisy mask (.mask)
    train       imagery + mask -> model (.csvm)
    predict     model + imagery -> mask
    evaluate    prediction + exact labels -> metrics (JSON on stdout)
    change      two masks -> change report (JSON on stdout)
    overlay     imagery + loss mask -> PNG
    run         execute a run manifest
    synth       write a synthetic dataset and its manifest

Exit codes: 0 success, 2 usage, 3 input, 4 numeric, 5 internal.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

from . import __version__
from .evaluation.change import change, overlay_png
from .evaluation.metrics import evaluate_masks
from .labels.evaluator import evaluate_rule
from .labels.rules import load_rule_file, parse_rule
from .lidar.loader import load_point_cloud
from .lidar.pointcloud import compute_bounds
from .lidar.stats_rasterizer import (
    load_stats_stack,
    rasterize_stats,
    stack_grid_for,
    stack_to_pseudo_rgb,
)
from .managers.artifact_manager import to_json
from .manifest import read_manifest
from .models.model_io import load_model, save_model
from .models.samples import extract_training_samples
from .models.svm import TrainConfig, predict_mask, train_svm
from .pipeline import run_pipeline
from .raster.container import write_container, write_mask
from .raster.files import load_mask, load_raster, read_bytes
from .raster.grid import BoundingBox, GridSpec, Window
from .raster.png import export_png
from .raster.resample import resample_nearest
from .synthetic.writer import write_synthetic_dataset
from .utils import config
from .utils.errors import CanopyLabError, InputError, InternalError, ParameterError
from .utils.helpers import parse_number_list

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


# ============================================================================
# HELPERS
# ============================================================================
def _write_output(path: Union[str, Path], data: Union[bytes, str]) -> None:
    path = Path(path)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {path} ({len(payload)} bytes)")


def _numbers(text: str, count: int, what: str) -> list[float]:
    try:
        return parse_number_list(text, count)
    except ValueError as e:
        raise ParameterError(f"{what}: {e}") from None


def _window(text: Optional[str]) -> Optional[Window]:
    if text is None:
        return None
    values = _numbers(text, 4, "--aoi")
    if any(int(v) != v for v in values):
        raise ParameterError("--aoi takes whole cell counts col,row,width,height")
    return Window(*(int(v) for v in values))


def _bands(text: Optional[str]) -> Optional[tuple[str, ...]]:
    if text is None:
        return None
    return tuple(b.strip() for b in text.split(",") if b.strip())


# ============================================================================
# COMMANDS
# ============================================================================
def cmd_rasterize(args: argparse.Namespace) -> int:
    cloud = load_point_cloud(args.input)
    if args.like is not None:
        grid = stack_grid_for(load_raster(args.like).spec, args.cell_size)
    elif args.bounds is not None:
        min_x, min_y, max_x, max_y = _numbers(args.bounds, 4, "--bounds")
        grid = GridSpec.from_bounds(BoundingBox(min_x, min_y, max_x, max_y), args.cell_size)
    else:
        grid = GridSpec.from_bounds(compute_bounds(cloud), args.cell_size)
    stack = rasterize_stats(cloud, grid, args.radius, config.THREADS)
    _write_output(args.output, write_container(stack.multiband))
    if args.png is not None:
        _write_output(args.png, export_png(stack_to_pseudo_rgb(stack)))
    return 0


def cmd_label(args: argparse.Namespace) -> int:
    if args.rule_file is not None:
        rule = load_rule_file(args.rule_file)
    else:
        rule = parse_rule(args.rule)
    mask = evaluate_rule(rule, load_stats_stack(args.stats))
    _write_output(args.output, write_mask(mask))
    if args.png is not None:
        _write_output(args.png, export_png(mask))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = TrainConfig(
        C=args.C,
        gamma=args.gamma,
        tol=args.tol,
        max_passes=args.max_passes,
        sample_count=args.samples,
        seed=args.seed,
    )
    image = load_raster(args.image)
    labels = resample_nearest(load_mask(args.labels), image.spec)
    samples = extract_training_samples(image, labels, cfg.sample_count, cfg.seed)
    model = train_svm(samples, cfg)
    _write_output(args.output, save_model(model))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(read_bytes(args.model))
    mask = predict_mask(model, load_raster(args.image), config.THREADS)
    _write_output(args.output, write_mask(mask))
    if args.png is not None:
        _write_output(args.png, export_png(mask))
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    prediction = load_mask(args.pred)
    tree_classes = None
    if args.tree_classes is not None:
        tree_classes = [int(v) for v in _numbers(args.tree_classes, None, "--tree-classes")]
    truth = resample_nearest(load_mask(args.truth, tree_classes), prediction.spec)
    report = evaluate_masks(prediction, truth)
    text = to_json(report.as_dict())
    if args.report is not None:
        _write_output(args.report, text)
    sys.stdout.write(text)
    return 0


def cmd_change(args: argparse.Namespace) -> int:
    earlier = load_mask(args.before)
    later = resample_nearest(load_mask(args.after), earlier.spec)
    report = change(earlier, later, _window(args.aoi))
    text = to_json(report.as_dict())
    if args.report is not None:
        _write_output(args.report, text)
    if args.loss_mask is not None:
        _write_output(args.loss_mask, write_mask(report.loss_mask))
    sys.stdout.write(text)
    return 0


def cmd_overlay(args: argparse.Namespace) -> int:
    loss = load_mask(args.loss)
    image = resample_nearest(load_raster(args.image), loss.spec)
    bands = _bands(args.bands)
    if bands is None and all(b in image.names for b in config.TRUE_COLOR_BANDS):
        bands = config.TRUE_COLOR_BANDS
    _write_output(args.output, overlay_png(image, loss, args.alpha, bands))
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    result = run_pipeline(read_manifest(args.manifest))
    sys.stdout.write(to_json({"output_dir": str(result.output_dir), **result.summary}))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    years = [int(v) for v in _numbers(args.years, None, "--years")]
    removal = _numbers(args.removal, None, "--removal") if args.removal else []
    path = write_synthetic_dataset(
        args.directory,
        seed=args.seed,
        train_year=args.train_year,
        years=years,
        removal_fractions=removal,
        samples=args.samples,
    )
    sys.stdout.write(f"{path}\n")
    return 0


# ============================================================================
# PARSER
# ============================================================================
def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser.

    Returns:
        Parser with one subparser per command
    """
    parser = argparse.ArgumentParser(
        prog="canopylab",
        description="canopylab - tree canopy mapping from LiDAR-derived noisy labels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=config.THREADS,
        help="Worker threads for rasterization and prediction (0 = one per CPU)",
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = commands.add_parser("rasterize", help="Point cloud to statistics stack")
    p.add_argument("--input", required=True, help="LAS or text point file")
    p.add_argument("-o", "--output", required=True, help="Statistics stack (.cnpy)")
    p.add_argument("--cell-size", type=float, default=config.STATS_CELL_SIZE)
    p.add_argument("--radius", type=float, default=config.STATS_RADIUS)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--like", help="Cover this raster's extent")
    grid.add_argument("--bounds", help="min_x,min_y,max_x,max_y to cover")
    p.add_argument("--png", help="Also write a pseudo-color preview")
    p.set_defaults(func=cmd_rasterize)

    p = commands.add_parser("label", help="Apply a labelling rule to a statistics stack")
    p.add_argument("--stats", required=True, help="Statistics stack (.cnpy)")
    p.add_argument("-o", "--output", required=True, help="Noisy mask (.mask)")
    rule = p.add_mutually_exclusive_group()
    rule.add_argument("--rule", default=config.DEFAULT_TREE_RULE, help="Rule expression")
    rule.add_argument("--rule-file", help="File holding the rule expression")
    p.add_argument("--png", help="Also write a mask preview")
    p.set_defaults(func=cmd_label)

    p = commands.add_parser("train", help="Train the SVM on imagery and a label mask")
    p.add_argument("--image", required=True, help="Imagery (.cnpy)")
    p.add_argument("--labels", required=True, help="Label mask (.mask or land-cover .asc)")
    p.add_argument("-o", "--output", required=True, help="Model file")
    p.add_argument("--C", "-C", dest="C", type=float, default=config.SVM_C)
    p.add_argument("--gamma", type=float, default=config.SVM_GAMMA)
    p.add_argument("--tol", type=float, default=config.SVM_TOL)
    p.add_argument("--max-passes", type=int, default=config.SVM_MAX_PASSES)
    p.add_argument("--samples", type=int, default=config.SVM_SAMPLES_PER_CLASS, help="Per class")
    p.add_argument("--seed", type=int, default=config.SVM_SEED)
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("predict", help="Classify imagery with a model")
    p.add_argument("--image", required=True, help="Imagery (.cnpy)")
    p.add_argument("--model", required=True, help="Model file")
    p.add_argument("-o", "--output", required=True, help="Predicted mask (.mask)")
    p.add_argument("--png", help="Also write a mask preview")
    p.set_defaults(func=cmd_predict)

    p = commands.add_parser("evaluate", help="Score a prediction against exact labels")
    p.add_argument("--pred", required=True, help="Predicted mask (.mask)")
    p.add_argument("--truth", required=True, help="Exact labels (.mask or land-cover .asc)")
    p.add_argument("--tree-classes", help="Land-cover ids counted as tree (default 1)")
    p.add_argument("--report", help="Also write the metrics JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = commands.add_parser("change", help="Tree-cover change between two masks")
    p.add_argument("--before", required=True, help="Earlier mask (.mask)")
    p.add_argument("--after", required=True, help="Later mask (.mask)")
    p.add_argument("--aoi", help="col,row,width,height in cells")
    p.add_argument("--report", help="Also write the report JSON here")
    p.add_argument("--loss-mask", help="Write the loss mask here")
    p.set_defaults(func=cmd_change)

    p = commands.add_parser("overlay", help="Blend loss pixels toward red over imagery")
    p.add_argument("--image", required=True, help="Imagery (.cnpy)")
    p.add_argument("--loss", required=True, help="Loss mask (.mask)")
    p.add_argument("-o", "--output", required=True, help="PNG file")
    p.add_argument("--alpha", type=float, default=config.OVERLAY_ALPHA)
    p.add_argument("--bands", help="Three band names rendered as R,G,B")
    p.set_defaults(func=cmd_overlay)

    p = commands.add_parser("run", help="Execute a run manifest")
    p.add_argument("manifest", help="Manifest (.ini)")
    p.set_defaults(func=cmd_run)

    p = commands.add_parser("synth", help="Write a synthetic dataset and manifest")
    p.add_argument("directory", help="Destination directory")
    p.add_argument("--seed", type=int, default=config.SVM_SEED)
    p.add_argument("--train-year", type=int, default=config.SYNTH_TRAIN_YEAR)
    p.add_argument("--years", default=",".join(str(y) for y in config.SYNTH_YEARS))
    p.add_argument(
        "--removal",
        default=",".join(str(f) for f in config.SYNTH_REMOVAL_FRACTIONS),
        help="Tree share removed between consecutive years",
    )
    p.add_argument("--samples", type=int, default=config.SYNTH_TRAIN_SAMPLES, help="Per class")
    p.set_defaults(func=cmd_synth)

    return parser


def configure_logging(verbose: bool) -> None:
    """Set up root logging once for the process."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv: Arguments without the program name (default sys.argv[1:])

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    config.THREADS = args.threads
    config.VERBOSE = args.verbose
    configure_logging(config.VERBOSE)

    try:
        return args.func(args)
    except CanopyLabError as e:
        logger.error(f"Fatal error: {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return InternalError.exit_code


if __name__ == "__main__":
    sys.exit(main())
