"""Trajectory prototype extraction via learned spatial alignment and vector quantization."""

from .align import (
    AlignmentGradients,
    AlignmentModel,
    AlignTrainConfig,
    RegressorParams,
    align,
    align_all,
    align_gradients,
    align_loss,
    predict_transform,
    train_alignment,
)
from .core import (
    Dataset,
    Point2,
    SimilarityTransform,
    Trajectory,
    apply_transform,
    centroid,
    mse,
)
from .datagen import LabeledDataset, SgtdConfig, generate_sgtd
from .errors import (
    DegenerateTrajectoryError,
    DivergedTrainingError,
    EmptyResultError,
    ModelFormatError,
    ParseError,
    TrajprotoError,
    UnsupportedVersionError,
)
from .normalize import NormalizedTrajectory, normalize, normalize_dataset
from .quantize import (
    LVQConfig,
    PrototypeSet,
    QuantizationResult,
    assign,
    assign_all,
    evaluate,
    forgy_init,
    lvq_gradients,
    lvq_loss,
    quantization_error,
    refine,
    train_lvq,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentGradients",
    "AlignmentModel",
    "AlignTrainConfig",
    "Dataset",
    "DegenerateTrajectoryError",
    "DivergedTrainingError",
    "EmptyResultError",
    "LVQConfig",
    "LabeledDataset",
    "ModelFormatError",
    "NormalizedTrajectory",
    "ParseError",
    "Point2",
    "PrototypeSet",
    "QuantizationResult",
    "RegressorParams",
    "SgtdConfig",
    "SimilarityTransform",
    "Trajectory",
    "TrajprotoError",
    "UnsupportedVersionError",
    "align",
    "align_all",
    "align_gradients",
    "align_loss",
    "apply_transform",
    "assign",
    "assign_all",
    "centroid",
    "evaluate",
    "forgy_init",
    "generate_sgtd",
    "lvq_gradients",
    "lvq_loss",
    "mse",
    "normalize",
    "normalize_dataset",
    "predict_transform",
    "quantization_error",
    "refine",
    "train_lvq",
    "__version__",
]
