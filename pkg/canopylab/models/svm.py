"""
Gaussian-kernel support vector machine.

Training maximises the soft-margin dual

    W(a) = sum(a) - 1/2 * sum_ij a_i a_j y_i y_j k(x_i, x_j)
    subject to 0 <= a_i <= C and sum(a_i y_i) = 0

by sequential minimal optimization with the kernel k(u, v) = exp(-gamma |u - v|^2).
The decision function is f(x) = sum_i a_i y_i k(x_i, x) + b; a pixel is tree
when f(x) >= 0.
"""

import logging
import math
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..raster.layers import BinaryMask, MultibandRaster
from ..utils import config
from ..utils.errors import InternalError, NumericError, ParameterError
from ..utils.parallel import map_row_bands
from .samples import NON_TREE_LABEL, TREE_LABEL, SampleSet, image_features

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """
    SVM training parameters.

    Attributes:
        C: Box constraint
        gamma: Kernel width
        tol: KKT violation tolerance
        max_passes: Consecutive violation-free full sweeps that end training
        sample_count: Training pixels drawn per class
        seed: Sampling seed
    """

    C: float = field(default_factory=lambda: config.SVM_C)
    gamma: float = field(default_factory=lambda: config.SVM_GAMMA)
    tol: float = field(default_factory=lambda: config.SVM_TOL)
    max_passes: int = field(default_factory=lambda: config.SVM_MAX_PASSES)
    sample_count: int = field(default_factory=lambda: config.SVM_SAMPLES_PER_CLASS)
    seed: int = field(default_factory=lambda: config.SVM_SEED)

    def __post_init__(self) -> None:
        for name in ("C", "gamma", "tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value}")
        if self.max_passes < 1:
            raise ParameterError(f"max_passes must be at least 1, got {self.max_passes}")
        if self.sample_count < 1:
            raise ParameterError(f"sample_count must be at least 1, got {self.sample_count}")


@dataclass(frozen=True, eq=False)
class SvmModel:
    """
    Trained classifier.

    Attributes:
        support_vectors: float64 array (M, d)
        dual_coefs: float64 array (M,) holding a_i * y_i
        bias: Offset b of the decision function
        gamma: Kernel width
        C: Box constraint of the training run, when known
    """

    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    gamma: float
    C: Optional[float] = None

    def __post_init__(self) -> None:
        vectors = np.array(self.support_vectors, dtype=np.float64, copy=True)
        coefs = np.array(self.dual_coefs, dtype=np.float64, copy=True).reshape(-1)
        if vectors.ndim != 2 or vectors.shape[0] != coefs.shape[0]:
            raise ParameterError(
                f"support vectors {vectors.shape} and coefficients {coefs.shape} do not match"
            )
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        vectors.setflags(write=False)
        coefs.setflags(write=False)
        object.__setattr__(self, "support_vectors", vectors)
        object.__setattr__(self, "dual_coefs", coefs)
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def support_count(self) -> int:
        return len(self.dual_coefs)

    @property
    def dimension(self) -> int:
        return self.support_vectors.shape[1]


# ============================================================================
# KERNEL AND DECISION FUNCTION
# ============================================================================
def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """
    Gaussian kernel matrix.

    Args:
        a: Vectors (n, d)
        b: Vectors (m, d)
        gamma: Kernel width

    Returns:
        (n, m) array of exp(-gamma * |a_i - b_j|^2)
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    squared = (
        np.einsum("ij,ij->i", a, a)[:, None]
        + np.einsum("ij,ij->i", b, b)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(squared, 0.0))


def decision_values(model: SvmModel, features: np.ndarray) -> np.ndarray:
    """
    Decision function for many feature vectors.

    Args:
        model: Trained model
        features: Vectors (n, d)

    Returns:
        float64 array (n,) of f(x)
    """
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if features.shape[1] != model.dimension:
        raise ParameterError(
            f"model expects {model.dimension} features, got {features.shape[1]}"
        )
    values = np.full(len(features), model.bias)
    if model.support_count == 0:
        return values
    chunk = config.PREDICT_CHUNK_PIXELS
    for start in range(0, len(features), chunk):
        block = rbf_kernel(features[start:start + chunk], model.support_vectors, model.gamma)
        values[start:start + chunk] += block @ model.dual_coefs
    return values


def decision_value(model: SvmModel, feature: np.ndarray) -> float:
    """f(x) for one feature vector."""
    return float(decision_values(model, np.asarray(feature, dtype=np.float64)[None, :])[0])


def classify(values: np.ndarray) -> np.ndarray:
    """Labels from decision values; f(x) = 0 counts as tree."""
    return np.where(np.asarray(values) >= 0.0, TREE_LABEL, NON_TREE_LABEL).astype(np.int8)


def accuracy(model: SvmModel, samples: SampleSet) -> float:
    """Fraction of samples whose label the model reproduces."""
    if len(samples) == 0:
        return 0.0
    predicted = classify(decision_values(model, samples.features))
    return float(np.mean(predicted == samples.labels))


def dual_objective(
    alphas: np.ndarray, features: np.ndarray, labels: np.ndarray, gamma: float
) -> float:
    """W(a) = sum(a) - 1/2 sum_ij a_i a_j y_i y_j k(x_i, x_j)."""
    weighted = np.asarray(alphas, dtype=np.float64) * np.asarray(labels, dtype=np.float64)
    gram = rbf_kernel(features, features, gamma)
    return float(np.sum(alphas) - 0.5 * weighted @ gram @ weighted)


# ============================================================================
# TRAINING
# ============================================================================
class _SmoSolver:
    """
    Sequential minimal optimization with a full error vector.

    The first multiplier of a pair is the next KKT violator in sweep order;
    the second maximises |E1 - E2| among unbounded multipliers, falling back
    to unbounded then all multipliers in index order. Kernel rows are
    computed on demand and kept in a small LRU cache.
    """

    def __init__(self, samples: SampleSet, cfg: TrainConfig) -> None:
        self.x = samples.features
        self.y = samples.labels.astype(np.float64)
        self.n = len(samples)
        self.C = cfg.C
        self.tol = cfg.tol
        self.gamma = cfg.gamma
        self.alpha = np.zeros(self.n)
        self.bias = 0.0
        # E_i = f(x_i) - y_i with every multiplier at zero
        self.errors = -self.y.copy()
        self.rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self.steps = 0

    def kernel(self, i: int, j: int) -> float:
        diff = self.x[i] - self.x[j]
        return math.exp(-self.gamma * float(diff @ diff))

    def kernel_row(self, i: int) -> np.ndarray:
        row = self.rows.get(i)
        if row is not None:
            self.rows.move_to_end(i)
            return row
        diff = self.x - self.x[i]
        row = np.exp(-self.gamma * np.einsum("ij,ij->i", diff, diff))
        if not np.all(np.isfinite(row)):
            raise NumericError(f"kernel row {i} holds non-finite values")
        self.rows[i] = row
        if len(self.rows) > config.SVM_KERNEL_CACHE_ROWS:
            self.rows.popitem(last=False)
        return row

    def _snap(self, value: float) -> float:
        if value < config.SVM_ALPHA_EPSILON:
            return 0.0
        if value > self.C - config.SVM_ALPHA_EPSILON:
            return self.C
        return value

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if y1 != y2:
            low, high = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        else:
            low, high = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        if high - low < config.SVM_ALPHA_EPSILON:
            return False

        k12 = self.kernel(i1, i2)
        eta = 2.0 - 2.0 * k12  # k11 = k22 = 1
        if eta > 0:
            a2_new = min(max(a2 + y2 * (e1 - e2) / eta, low), high)
        else:
            # W along the constraint line, relative to the current point
            slope = y2 * (e1 - e2)
            low_obj = slope * (low - a2) - 0.5 * eta * (low - a2) ** 2
            high_obj = slope * (high - a2) - 0.5 * eta * (high - a2) ** 2
            if low_obj > high_obj + config.SVM_STEP_EPSILON:
                a2_new = low
            elif low_obj < high_obj - config.SVM_STEP_EPSILON:
                a2_new = high
            else:
                a2_new = a2
        a2_new = self._snap(a2_new)
        eps = config.SVM_STEP_EPSILON
        if abs(a2_new - a2) < eps * (a2_new + a2 + eps):
            return False
        a1_new = self._snap(min(max(a1 + s * (a2 - a2_new), 0.0), self.C))

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        b1 = self.bias - e1 - d1 - d2 * k12
        b2 = self.bias - e2 - d1 * k12 - d2
        if 0.0 < a1_new < self.C:
            bias = b1
        elif 0.0 < a2_new < self.C:
            bias = b2
        else:
            bias = 0.5 * (b1 + b2)

        self.errors += d1 * self.kernel_row(i1) + d2 * self.kernel_row(i2) + (bias - self.bias)
        self.alpha[i1], self.alpha[i2] = a1_new, a2_new
        self.bias = bias
        self.steps += 1
        return True

    def unbounded(self) -> np.ndarray:
        return np.flatnonzero((self.alpha > 0.0) & (self.alpha < self.C))

    def examine(self, i2: int) -> bool:
        a2 = self.alpha[i2]
        e2 = self.errors[i2]
        r2 = e2 * self.y[i2]
        if not ((r2 < -self.tol and a2 < self.C) or (r2 > self.tol and a2 > 0.0)):
            return False
        candidates = self.unbounded()
        if candidates.size > 1:
            i1 = int(candidates[np.argmax(np.abs(self.errors[candidates] - e2))])
            if self.take_step(i1, i2):
                return True
        for i1 in candidates:
            if self.take_step(int(i1), i2):
                return True
        for i1 in range(self.n):
            if self.take_step(i1, i2):
                return True
        return False

    def solve(self, max_passes: int) -> int:
        """
        Run sweeps until max_passes consecutive full sweeps change nothing.

        Returns:
            Number of sweeps performed
        """
        examine_all = True
        quiet_passes = 0
        for sweep in range(1, config.SVM_MAX_SWEEPS + 1):
            indices = range(self.n) if examine_all else self.unbounded().tolist()
            changed = sum(self.examine(i) for i in indices)
            logger.debug(
                f"SMO sweep {sweep} ({'full' if examine_all else 'unbounded'}): "
                f"{changed} pair updates"
            )
            if examine_all:
                quiet_passes = quiet_passes + 1 if changed == 0 else 0
                if quiet_passes >= max_passes:
                    return sweep
                examine_all = changed == 0
            elif changed == 0:
                examine_all = True
        logger.warning(
            f"SMO stopped after {config.SVM_MAX_SWEEPS} sweeps without meeting the KKT "
            f"tolerance {self.tol}"
        )
        return config.SVM_MAX_SWEEPS

    def final_bias(self) -> float:
        """Average offset over unbounded multipliers, which sit on the margin."""
        free = self.unbounded()
        if free.size == 0:
            return self.bias
        return float(np.mean(self.bias - self.errors[free]))


@dataclass(frozen=True, eq=False)
class DualSolution:
    """Multipliers and offset found by SMO, with run statistics."""

    alphas: np.ndarray
    bias: float
    sweeps: int
    steps: int


def solve_dual(samples: SampleSet, cfg: Optional[TrainConfig] = None) -> DualSolution:
    """
    Maximise the dual for a sample set.

    Args:
        samples: Labelled features with both classes present
        cfg: Training parameters (defaults from config)

    Returns:
        DualSolution with one multiplier per sample

    Raises:
        ParameterError: Fewer than two samples or a single class
        NumericError: Non-finite features or kernel values
        InternalError: The solution breaks the box or equality constraint
    """
    cfg = cfg or TrainConfig()
    positives, negatives = samples.class_counts()
    if len(samples) < 2 or positives == 0 or negatives == 0:
        raise ParameterError(
            f"training needs both classes, got {positives} tree and {negatives} non-tree samples"
        )
    if not np.all(np.isfinite(samples.features)):
        raise NumericError("training features hold non-finite values")

    solver = _SmoSolver(samples, cfg)
    sweeps = solver.solve(cfg.max_passes)
    bias = solver.final_bias()
    alpha = solver.alpha.copy()

    if np.any(alpha < 0.0) or np.any(alpha > cfg.C):
        raise InternalError("SMO left a multiplier outside [0, C]")
    balance = float(alpha @ solver.y)
    if abs(balance) > cfg.tol:
        raise InternalError(f"SMO broke the equality constraint: sum(a*y) = {balance:.3g}")
    if not math.isfinite(bias):
        raise NumericError("SMO produced a non-finite bias")
    alpha.setflags(write=False)
    return DualSolution(alpha, bias, sweeps, solver.steps)


def train_svm(samples: SampleSet, cfg: Optional[TrainConfig] = None) -> SvmModel:
    """
    Train a Gaussian-kernel SVM.

    Args:
        samples: Labelled features with both classes present
        cfg: Training parameters (defaults from config)

    Returns:
        Model whose support vectors are exactly the samples with a_i > 0

    Raises:
        ParameterError: Fewer than two samples or a single class
        NumericError: Non-finite features or kernel values
        InternalError: The solution breaks the box or equality constraint
    """
    cfg = cfg or TrainConfig()
    started = time.perf_counter()
    solution = solve_dual(samples, cfg)
    alpha = solution.alphas
    support = alpha > 0.0
    model = SvmModel(
        support_vectors=samples.features[support],
        dual_coefs=(alpha * samples.labels)[support],
        bias=solution.bias,
        gamma=cfg.gamma,
        C=cfg.C,
    )
    at_bound = int(np.count_nonzero(alpha >= cfg.C))
    logger.info(
        f"Trained SVM on {len(samples)} samples: {model.support_count} support vectors "
        f"({at_bound} at C), {solution.sweeps} sweeps, {solution.steps} steps, "
        f"{time.perf_counter() - started:.2f}s"
    )
    return model


# ============================================================================
# PREDICTION
# ============================================================================
def predict_mask(
    model: SvmModel,
    image: MultibandRaster,
    threads: Optional[int] = None,
    bands: Optional[tuple[str, ...]] = None,
) -> BinaryMask:
    """
    Classify every pixel of an image.

    Args:
        model: Trained model
        image: Imagery holding the feature bands
        threads: Worker count (None = config, 0 = auto)
        bands: Feature band order (default config.IMAGE_BANDS)

    Returns:
        Mask with bit = f(x) >= 0 on valid pixels; nodata pixels are invalid

    Raises:
        BandMismatchError: If the image lacks a feature band
    """
    band_names = tuple(bands or config.IMAGE_BANDS)
    features = image_features(image, band_names)
    valid = ~image.require_bands(band_names).pixel_nodata

    def predict_rows(start: int, stop: int) -> np.ndarray:
        # one row at a time keeps every pixel's arithmetic independent of banding
        return np.stack(
            [decision_values(model, features[row]) >= 0.0 for row in range(start, stop)]
        )

    bits = np.concatenate(map_row_bands(predict_rows, image.spec.height, threads))
    mask = BinaryMask(image.spec, bits, valid)
    logger.info(f"Predicted {mask.tree_count()} tree pixels of {int(valid.sum())} valid")
    return mask
