"""driftguard: feature-level drift diagnosis and weight-bounded hardening
for linear classifiers over timestamped sparse binary data.
"""

__version__ = "0.1.0"

from .core import (
    DataError,
    Dataset,
    FeatureDictionary,
    LinearModel,
    NumericError,
    SparseSample,
    predict_dataset,
    score_dataset,
)
from .drift import (
    DriftConfig,
    DriftRecord,
    DriftReport,
    SlotMeans,
    fit_slope,
    score_trend,
    slot_count,
    slot_means,
    stability_values,
    t_stability,
)
from .evaluation import (
    SlotMetrics,
    SplitSpec,
    decay_slope,
    evaluate_slots,
    partial_auc,
    slot_confusion,
    temporal_split,
)
from .synth import REFERENCE_SPEC, GroundTruth, SynthSpec, generate
from .trainer import (
    CbConfig,
    TrainConfig,
    hinge_gradient,
    hinge_loss,
    schedule_value,
    train_svm,
    train_svm_cb,
)

__all__ = [
    "__version__",
    "DataError", "NumericError",
    "FeatureDictionary", "SparseSample", "Dataset", "LinearModel",
    "score_dataset", "predict_dataset",
    "TrainConfig", "CbConfig", "schedule_value",
    "hinge_loss", "hinge_gradient", "train_svm", "train_svm_cb",
    "DriftConfig", "SlotMeans", "DriftRecord", "DriftReport",
    "slot_count", "slot_means", "fit_slope", "stability_values",
    "t_stability", "score_trend",
    "SplitSpec", "SlotMetrics", "temporal_split", "slot_confusion",
    "partial_auc", "evaluate_slots", "decay_slope",
    "SynthSpec", "GroundTruth", "REFERENCE_SPEC", "generate",
]
