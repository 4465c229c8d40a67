"""Behavioral telemetry analysis and the hybrid human/bot classifier."""

from .classify import (
    MARGIN_BAND,
    ClassifierMetrics,
    HeuristicFlags,
    Label,
    LabeledSession,
    Verdict,
    classify,
    evaluate_classifier,
    heuristic_flags,
)
from .features import (
    FEATURE_NAMES,
    N_FEATURES,
    EventKind,
    FeatureVector,
    InsufficientDataError,
    InteractionEvent,
    TelemetryError,
    events_from_wire,
    extract_features,
    validate_events,
)
from .svm import (
    BOT_LABEL,
    HUMAN_LABEL,
    DatasetError,
    ModelFormatError,
    SvmModel,
    SvmTrainConfig,
    hinge_loss,
    load_model,
    save_model,
    svm_decision,
    train_svm,
)

__all__ = [
    "BOT_LABEL",
    "ClassifierMetrics",
    "DatasetError",
    "EventKind",
    "FEATURE_NAMES",
    "FeatureVector",
    "HUMAN_LABEL",
    "HeuristicFlags",
    "InsufficientDataError",
    "InteractionEvent",
    "Label",
    "LabeledSession",
    "MARGIN_BAND",
    "ModelFormatError",
    "N_FEATURES",
    "SvmModel",
    "SvmTrainConfig",
    "TelemetryError",
    "Verdict",
    "classify",
    "evaluate_classifier",
    "events_from_wire",
    "extract_features",
    "heuristic_flags",
    "hinge_loss",
    "load_model",
    "save_model",
    "svm_decision",
    "train_svm",
    "validate_events",
]
