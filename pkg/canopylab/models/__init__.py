"""Training samples, the Gaussian-kernel SVM and its file format."""

from .model_io import load_model, save_model
from .samples import (
    NON_TREE_LABEL,
    TREE_LABEL,
    SampleSet,
    extract_training_samples,
    image_features,
)
from .svm import (
    DualSolution,
    SvmModel,
    TrainConfig,
    accuracy,
    classify,
    decision_value,
    decision_values,
    dual_objective,
    predict_mask,
    rbf_kernel,
    solve_dual,
    train_svm,
)

__all__ = [
    "DualSolution",
    "NON_TREE_LABEL",
    "SampleSet",
    "SvmModel",
    "TREE_LABEL",
    "TrainConfig",
    "accuracy",
    "classify",
    "decision_value",
    "decision_values",
    "dual_objective",
    "extract_training_samples",
    "image_features",
    "load_model",
    "predict_mask",
    "rbf_kernel",
    "save_model",
    "solve_dual",
    "train_svm",
]
