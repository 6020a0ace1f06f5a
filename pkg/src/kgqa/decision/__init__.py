from .evidence import (
    R1,
    R2,
    EvidenceTag,
    FeatureVector,
    classify_evidence,
    extract_features,
)
from .models import (
    DecisionModel,
    EvalMetrics,
    GaussianBayesModel,
    LabeledExample,
    LogisticModel,
    MlpModel,
    TrainConfig,
    evaluate,
    load_dataset,
    load_model,
    save_dataset,
    train,
)
from .synthetic import generate_dataset, train_test_split

__all__ = [
    "R1",
    "R2",
    "EvidenceTag",
    "FeatureVector",
    "classify_evidence",
    "extract_features",
    "DecisionModel",
    "EvalMetrics",
    "GaussianBayesModel",
    "LabeledExample",
    "LogisticModel",
    "MlpModel",
    "TrainConfig",
    "evaluate",
    "load_dataset",
    "load_model",
    "save_dataset",
    "train",
    "generate_dataset",
    "train_test_split",
]
