"""
One-sided k-Means: Lloyd clustering of the Target rows plus a distance threshold.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.shared.exceptions import TrainingError
from app.modules.dataset.schemas import IndexView
from app.modules.dataset.service import make_rng, targets_of
from app.modules.kmeans.models import KMeansModel
from app.modules.metrics.schemas import DistanceMetric
from app.modules.preprocess.schemas import NormKind
from app.modules.preprocess.service import apply_normalization, fit_normalization

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LloydResult:
    centroids: np.ndarray
    assignments: np.ndarray
    objective_history: Tuple[float, ...]
    iterations: int


def _squared_distances(rows: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    out = np.empty((rows.shape[0], centroids.shape[0]))
    for c, centroid in enumerate(centroids):
        diff = rows - centroid
        out[:, c] = np.sum(diff * diff, axis=1)
    return out


def lloyd(rows: np.ndarray, clusters: int, seed: int, max_iter: Optional[int] = None) -> LloydResult:
    """
    Lloyd's algorithm with Forgy initialisation from a PCG64 stream.

    Stops when assignments no longer change or after `max_iter` updates.
    An empty cluster is moved onto the point farthest from its nearest
    centroid. `objective_history[i]` is the sum of squared distances after
    the i-th assignment step and never increases.
    """
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[0]
    if clusters < 1:
        raise TrainingError(f"the number of clusters must be at least 1, got {clusters}")
    if clusters > n:
        raise TrainingError(f"cannot form {clusters} clusters from {n} targets")
    max_iter = settings.KMEANS_MAX_ITER if max_iter is None else max_iter

    rng = make_rng(seed)
    centroids = rows[rng.choice(n, size=clusters, replace=False)].copy()
    assignments: Optional[np.ndarray] = None
    history = []

    iteration = 0
    while True:
        squared = _squared_distances(rows, centroids)
        new_assignments = np.argmin(squared, axis=1)
        history.append(float(squared[np.arange(n), new_assignments].sum()))
        converged = assignments is not None and np.array_equal(new_assignments, assignments)
        assignments = new_assignments
        if converged or iteration == max_iter:
            break

        nearest = squared[np.arange(n), assignments]
        taken = set()
        for c in range(clusters):
            members = rows[assignments == c]
            if members.shape[0]:
                centroids[c] = members.mean(axis=0)
                continue
            for candidate in np.argsort(-nearest, kind="stable"):
                if int(candidate) not in taken:
                    taken.add(int(candidate))
                    centroids[c] = rows[candidate]
                    break
            logger.debug(f"Reseeded empty cluster {c} at iteration {iteration}")
        iteration += 1

    if not converged:
        logger.warning(f"k-means stopped at the iteration cap ({max_iter}) before converging")
    return LloydResult(
        centroids=centroids,
        assignments=assignments,
        objective_history=tuple(history),
        iterations=iteration,
    )


def train_kmeans(
    targets: IndexView,
    clusters: int = 10,
    seed: int = 2,
    threshold: float = 1.5,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    norm: NormKind = NormKind.NONE,
) -> KMeansModel:
    """Cluster the Target rows of `targets`; Other rows are ignored."""
    if threshold <= 0:
        raise TrainingError(f"threshold must be positive, got {threshold}")
    view = targets_of(targets)
    if len(view) < max(clusters, 1):
        raise TrainingError(f"cannot form {clusters} clusters from {len(view)} targets")
    mode = fit_normalization(NormKind(norm), view)
    result = lloyd(apply_normalization(mode, view.features()), clusters, seed)
    logger.debug(
        f"k-means with C={clusters} finished after {result.iterations} updates, "
        f"objective {result.objective_history[-1]}"
    )
    return KMeansModel(result.centroids, threshold, metric, mode, result.objective_history)


def predict_kmeans(model: KMeansModel, x: Sequence[float]) -> str:
    return model.predict(x)
