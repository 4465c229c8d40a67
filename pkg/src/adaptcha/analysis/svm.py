"""Linear SVM trained by stochastic subgradient descent on the
regularized hinge loss

    L(w, b) = lambda/2 * ||w||^2 + 1/n * sum_i max(0, 1 - y_i (w.z_i + b))

over standardized features z = (x - mean) / std. Standardization
parameters are computed on the training set and stored in the model so
inference applies the identical transform. The bias is not regularized.

Determinism contract: the dataset is first put into a canonical order
(sorted by feature values, then label), then shuffled once per epoch by
the seeded generator. Training therefore depends on the dataset only as
a multiset plus the seed, never on input order.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..rng import SplitMix64, derive
from .features import N_FEATURES, FeatureVector

MODEL_FORMAT = "adaptcha-svm"
MODEL_VERSION = 1

MIN_FEATURE_STD = 1e-6
MIN_DATASET_SIZE = 10

HUMAN_LABEL = +1
BOT_LABEL = -1


class ModelFormatError(ValueError):
    """Model file bytes are not a valid SVM snapshot."""


class DatasetError(ValueError):
    """Training set unusable (too small or single-class)."""


@dataclass
class SvmModel:
    w: np.ndarray
    b: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.feature_means = np.asarray(self.feature_means, dtype=np.float64)
        self.feature_stds = np.asarray(self.feature_stds, dtype=np.float64)
        for arr, name in ((self.w, "w"), (self.feature_means, "means"), (self.feature_stds, "stds")):
            if arr.shape != (N_FEATURES,):
                raise ValueError(f"{name} must have shape ({N_FEATURES},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if not np.isfinite(self.b):
            raise ValueError("bias must be finite")
        if np.any(self.feature_stds <= 0):
            raise ValueError("feature stds must be strictly positive")

    def standardize(self, x: FeatureVector) -> np.ndarray:
        return (np.array(x.as_list()) - self.feature_means) / self.feature_stds

    @staticmethod
    def zero() -> "SvmModel":
        return SvmModel(
            w=np.zeros(N_FEATURES),
            b=0.0,
            feature_means=np.zeros(N_FEATURES),
            feature_stds=np.ones(N_FEATURES),
        )


def svm_decision(model: SvmModel, x: FeatureVector) -> float:
    """Signed decision value; positive leans human, negative leans bot."""
    return float(model.w @ model.standardize(x) + model.b)


@dataclass
class SvmTrainConfig:
    lam: float = 1e-3            # L2 strength
    epochs: int = 60
    eta0: float = 0.5            # step size eta0 / (1 + epoch), constant within an epoch
    seed: int = 0


def _canonical_order(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    keys = np.concatenate([xs, ys[:, None]], axis=1)
    return np.lexsort(keys.T[::-1])


def train_svm(
    dataset: list[tuple[FeatureVector, int]],
    config: SvmTrainConfig | None = None,
) -> SvmModel:
    """Fit the hinge-loss model; deterministic given config.seed."""
    config = config or SvmTrainConfig()
    if len(dataset) < MIN_DATASET_SIZE:
        raise DatasetError(f"need >= {MIN_DATASET_SIZE} examples, got {len(dataset)}")

    xs = np.array([x.as_list() for x, _ in dataset], dtype=np.float64)
    ys = np.array([y for _, y in dataset], dtype=np.float64)
    if not (np.any(ys == HUMAN_LABEL) and np.any(ys == BOT_LABEL)):
        raise DatasetError("training set must contain both classes")
    if set(np.unique(ys)) - {HUMAN_LABEL, BOT_LABEL}:
        raise DatasetError("labels must be +1 (human) or -1 (bot)")

    order = _canonical_order(xs, ys)
    xs, ys = xs[order], ys[order]

    means = xs.mean(axis=0)
    stds = xs.std(axis=0)
    degenerate = stds < MIN_FEATURE_STD
    if np.any(degenerate):
        warnings.warn(
            f"zero-variance feature(s) at indices {np.flatnonzero(degenerate).tolist()}; "
            f"std clamped to {MIN_FEATURE_STD}",
            stacklevel=2,
        )
        stds = np.where(degenerate, MIN_FEATURE_STD, stds)
    zs = (xs - means) / stds

    n = len(zs)
    rng = SplitMix64(derive(config.seed, "svm-shuffle"))
    w = np.zeros(N_FEATURES)
    b = 0.0
    indices = list(range(n))
    for epoch in range(config.epochs):
        rng.shuffle(indices)
        eta = config.eta0 / (1.0 + epoch)
        for i in indices:
            margin = ys[i] * (w @ zs[i] + b)
            w *= 1.0 - eta * config.lam
            if margin < 1.0:
                w += eta * ys[i] * zs[i]
                b += eta * ys[i]

    return SvmModel(
        w=w,
        b=b,
        feature_means=means,
        feature_stds=stds,
        metadata={
            "trainer": "hinge-sgd",
            "seed": config.seed,
            "epochs": config.epochs,
            "lambda": config.lam,
            "eta0": config.eta0,
            "n_train": n,
        },
    )


def hinge_loss(model: SvmModel, dataset: list[tuple[FeatureVector, int]], lam: float) -> float:
    """Objective value on a dataset; used by the descent property test."""
    zs = np.array([model.standardize(x) for x, _ in dataset])
    ys = np.array([y for _, y in dataset], dtype=np.float64)
    margins = ys * (zs @ model.w + model.b)
    return float(0.5 * lam * model.w @ model.w + np.mean(np.maximum(0.0, 1.0 - margins)))


def save_model(model: SvmModel) -> bytes:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "w": model.w.tolist(),
        "b": model.b,
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
        "metadata": model.metadata,
    }
    return json.dumps(doc, indent=1).encode("utf-8")


def load_model(data: bytes) -> SvmModel:
    if not data:
        raise ModelFormatError("empty model payload")
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"unparseable model payload: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not an SVM model snapshot")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    try:
        return SvmModel(
            w=np.array(doc["w"], dtype=np.float64),
            b=float(doc["b"]),
            feature_means=np.array(doc["feature_means"], dtype=np.float64),
            feature_stds=np.array(doc["feature_stds"], dtype=np.float64),
            metadata=doc.get("metadata", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model contents: {exc}") from exc
