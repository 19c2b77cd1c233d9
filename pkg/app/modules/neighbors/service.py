import logging
from typing import Sequence

from app.shared.exceptions import TrainingError
from app.modules.dataset.schemas import IndexView, OTHER, TARGET
from app.modules.dataset.service import targets_of
from app.modules.metrics.schemas import DistanceMetric
from app.modules.neighbors.models import BinaryKnnModel, NnPcModel, OsKnnModel
from app.modules.preprocess.schemas import NormKind
from app.modules.preprocess.service import apply_normalization, fit_normalization

logger = logging.getLogger(__name__)


def _normalized_targets(view: IndexView, norm: NormKind):
    targets = targets_of(view)
    mode = fit_normalization(NormKind(norm), targets) if len(targets) else None
    return targets, mode


def train_osknn(
    targets: IndexView,
    m: int = 3,
    k: int = 3,
    threshold: float = 1.5,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    norm: NormKind = NormKind.NONE,
) -> OsKnnModel:
    """
    Store the Target rows of `targets` for the D1/D2 ratio test.

    Other rows in the view are ignored.
    """
    if m < 1 or k < 1:
        raise TrainingError(f"m and k must be at least 1 (got m={m}, k={k})")
    if threshold <= 0:
        raise TrainingError(f"threshold must be positive, got {threshold}")
    view, mode = _normalized_targets(targets, norm)
    needed = max(m, k + 1)
    if len(view) < needed:
        raise TrainingError(
            f"one-sided kNN with m={m}, k={k} needs at least {needed} targets, got {len(view)}"
        )
    logger.debug(f"Training OSC-kNN on {len(view)} targets (m={m}, k={k}, T={threshold})")
    return OsKnnModel(
        apply_normalization(mode, view.features()), m, k, threshold, metric, mode
    )


def predict_osknn(model: OsKnnModel, x: Sequence[float]) -> str:
    return model.predict(x)


def train_nnpc(
    targets: IndexView,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    norm: NormKind = NormKind.NONE,
) -> NnPcModel:
    view, mode = _normalized_targets(targets, norm)
    if len(view) < 2:
        raise TrainingError(f"NN-PC needs at least 2 targets, got {len(view)}")
    model = NnPcModel(apply_normalization(mode, view.features()), metric, mode)
    logger.debug(f"NN-PC trained on {len(view)} targets, delta={model.delta}")
    return model


def predict_nnpc(model: NnPcModel, x: Sequence[float]) -> str:
    return model.predict(x)


def train_binary_knn(
    train: IndexView,
    k: int = 1,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    norm: NormKind = NormKind.NONE,
) -> BinaryKnnModel:
    """Two-class baseline: stores Target and Other rows alike."""
    labels = train.labels()
    if k < 1:
        raise TrainingError(f"k must be at least 1, got {k}")
    if TARGET not in labels or OTHER not in labels:
        raise TrainingError("the two-class kNN baseline needs both Target and Other examples")
    if len(train) < k:
        raise TrainingError(f"k={k} exceeds the {len(train)} training examples")
    mode = fit_normalization(NormKind(norm), train)
    return BinaryKnnModel(apply_normalization(mode, train.features()), labels, k, metric, mode)


def predict_binary_knn(model: BinaryKnnModel, x: Sequence[float]) -> str:
    return model.predict(x)
