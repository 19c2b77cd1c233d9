"""
Instance-based models: one-sided kNN (D1/D2 ratio), NN-PC and the
two-class kNN baseline.

Stored vectors are kept in lexicographic order so neighbour ties resolve
by value, not by the order the training rows arrived in.
"""

from typing import Any, Dict, List, Tuple

import numpy as np

from app.shared.classifier import Classifier
from app.modules.dataset.schemas import OTHER, TARGET
from app.modules.metrics.schemas import DistanceMetric
from app.modules.metrics.service import pairwise_distances
from app.modules.preprocess.schemas import NormalizationMode


def canonical_order(rows: np.ndarray) -> np.ndarray:
    """Permutation sorting rows lexicographically (first column most significant)."""
    if rows.shape[0] == 0 or rows.shape[1] == 0:
        return np.arange(rows.shape[0])
    return np.lexsort(rows.T[::-1])


def nearest(distances: np.ndarray, count: int) -> np.ndarray:
    """Indices of the `count` smallest distances, lower index first on ties."""
    return np.argsort(distances, kind="stable")[:count]


def mean_neighbour_radii(stored: np.ndarray, k: int, metric: DistanceMetric) -> np.ndarray:
    """Mean distance from each stored vector to its k nearest other stored vectors."""
    radii = np.empty(stored.shape[0])
    for i, row in enumerate(pairwise_distances(metric, stored, stored)):
        row = row.copy()
        row[i] = np.inf
        radii[i] = row[nearest(row, k)].mean()
    return radii


class OsKnnModel(Classifier):
    algorithm = "KNN"

    def __init__(
        self,
        stored_targets: np.ndarray,
        m: int,
        k: int,
        threshold: float,
        metric: DistanceMetric,
        norm: NormalizationMode,
    ):
        stored = np.asarray(stored_targets, dtype=float)
        super().__init__(stored.shape[1], norm)
        self.stored_targets = stored[canonical_order(stored)]
        self.stored_targets.setflags(write=False)
        self.m = int(m)
        self.k = int(k)
        self.threshold = float(threshold)
        self.metric = DistanceMetric(metric)
        self.radii = mean_neighbour_radii(self.stored_targets, self.k, self.metric)

    def ratio_terms(self, x: np.ndarray) -> Tuple[float, float]:
        """(D1, D2) for one normalized vector."""
        distances = pairwise_distances(self.metric, x, self.stored_targets)[0]
        neighbours = nearest(distances, self.m)
        return float(distances[neighbours].mean()), float(self.radii[neighbours].mean())

    def _decide(self, rows: np.ndarray) -> List[str]:
        labels = []
        for x in rows:
            d1, d2 = self.ratio_terms(x)
            if d2 == 0:
                labels.append(TARGET if d1 == 0 else OTHER)
            else:
                labels.append(OTHER if d1 / d2 > self.threshold else TARGET)
        return labels

    def hyperparameters(self) -> Dict[str, Any]:
        return {"m": self.m, "k": self.k, "threshold": self.threshold, "metric": self.metric.value}

    def state(self) -> Dict[str, Any]:
        return {"n_features": self.n_features, "stored_targets": self.stored_targets.tolist()}

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "OsKnnModel":
        stored = np.asarray(state["stored_targets"], dtype=float).reshape(-1, state["n_features"])
        return cls(stored, norm=norm, **hyperparameters)


class NnPcModel(Classifier):
    algorithm = "NNPC"

    def __init__(self, stored_targets: np.ndarray, metric: DistanceMetric, norm: NormalizationMode):
        stored = np.asarray(stored_targets, dtype=float)
        super().__init__(stored.shape[1], norm)
        self.stored_targets = stored[canonical_order(stored)]
        self.stored_targets.setflags(write=False)
        self.metric = DistanceMetric(metric)
        # delta = max over points of the distance to the closest other point
        pairwise = pairwise_distances(self.metric, self.stored_targets, self.stored_targets)
        np.fill_diagonal(pairwise, np.inf)
        self.delta = float(pairwise.min(axis=1).max())

    def _decide(self, rows: np.ndarray) -> List[str]:
        closest = pairwise_distances(self.metric, rows, self.stored_targets).min(axis=1)
        return [TARGET if d <= self.delta else OTHER for d in closest]

    def hyperparameters(self) -> Dict[str, Any]:
        return {"metric": self.metric.value}

    def state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "stored_targets": self.stored_targets.tolist(),
            "delta": self.delta,
        }

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "NnPcModel":
        stored = np.asarray(state["stored_targets"], dtype=float).reshape(-1, state["n_features"])
        return cls(stored, norm=norm, **hyperparameters)


class BinaryKnnModel(Classifier):
    """Two-class k-nearest-neighbour vote by linear scan; a tied vote predicts Target."""

    algorithm = "BKNN"

    def __init__(
        self,
        stored: np.ndarray,
        labels: Tuple[str, ...],
        k: int,
        metric: DistanceMetric,
        norm: NormalizationMode,
    ):
        stored = np.asarray(stored, dtype=float)
        super().__init__(stored.shape[1], norm)
        is_target = np.array([label == TARGET for label in labels], dtype=bool)
        if stored.shape[0] and stored.shape[1]:
            order = np.lexsort(np.vstack([is_target, stored.T[::-1]]))
        else:
            order = np.arange(stored.shape[0])
        self.stored = stored[order]
        self.stored.setflags(write=False)
        self.is_target = is_target[order]
        self.k = int(k)
        self.metric = DistanceMetric(metric)

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(TARGET if flag else OTHER for flag in self.is_target)

    def _decide(self, rows: np.ndarray) -> List[str]:
        labels = []
        for distances in pairwise_distances(self.metric, rows, self.stored):
            votes = int(self.is_target[nearest(distances, self.k)].sum())
            labels.append(TARGET if 2 * votes >= self.k else OTHER)
        return labels

    def hyperparameters(self) -> Dict[str, Any]:
        return {"k": self.k, "metric": self.metric.value}

    def state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "stored": self.stored.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "BinaryKnnModel":
        stored = np.asarray(state["stored"], dtype=float).reshape(-1, state["n_features"])
        return cls(stored, tuple(state["labels"]), norm=norm, **hyperparameters)
