from typing import Any, Dict, List, Tuple

import numpy as np

from app.shared.classifier import Classifier
from app.modules.dataset.schemas import OTHER, TARGET
from app.modules.metrics.schemas import DistanceMetric
from app.modules.metrics.service import pairwise_distances
from app.modules.preprocess.schemas import NormalizationMode


class KMeansModel(Classifier):
    """Target iff the nearest centroid lies within `threshold` under the model metric."""

    algorithm = "KMEANS"

    def __init__(
        self,
        centroids: np.ndarray,
        threshold: float,
        metric: DistanceMetric,
        norm: NormalizationMode,
        objective_history: Tuple[float, ...] = (),
    ):
        centroids = np.array(centroids, dtype=float)
        super().__init__(centroids.shape[1], norm)
        centroids.setflags(write=False)
        self.centroids = centroids
        self.threshold = float(threshold)
        self.metric = DistanceMetric(metric)
        self.objective_history = tuple(objective_history)

    @property
    def clusters(self) -> int:
        return self.centroids.shape[0]

    def nearest_centroid_distance(self, rows: np.ndarray) -> np.ndarray:
        return pairwise_distances(self.metric, rows, self.centroids).min(axis=1)

    def _decide(self, rows: np.ndarray) -> List[str]:
        return [TARGET if d <= self.threshold else OTHER for d in self.nearest_centroid_distance(rows)]

    def hyperparameters(self) -> Dict[str, Any]:
        return {"clusters": self.clusters, "threshold": self.threshold, "metric": self.metric.value}

    def state(self) -> Dict[str, Any]:
        return {"n_features": self.n_features, "centroids": self.centroids.tolist()}

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "KMeansModel":
        centroids = np.asarray(state["centroids"], dtype=float).reshape(-1, state["n_features"])
        return cls(
            centroids,
            threshold=hyperparameters["threshold"],
            metric=hyperparameters["metric"],
            norm=norm,
        )
