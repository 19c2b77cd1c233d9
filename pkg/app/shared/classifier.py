"""
Base class shared by every trained model in the toolkit.
"""

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, List, Sequence

import numpy as np

from app.shared.exceptions import ArityMismatchError
from app.modules.preprocess.schemas import NormalizationMode
from app.modules.preprocess.service import apply_normalization


class Classifier(ABC):
    """
    A trained, immutable model labelling feature vectors Target or Other.

    Subclasses hold their learned state already in the normalized space and
    implement `_decide` over normalized rows; `predict_many` applies the
    model's normalization first.
    """

    algorithm: ClassVar[str]

    def __init__(self, n_features: int, norm: NormalizationMode):
        self._n_features = int(n_features)
        self.norm = norm

    @property
    def n_features(self) -> int:
        return self._n_features

    def predict_many(self, rows: Sequence[Sequence[float]]) -> List[str]:
        rows = np.asarray(rows, dtype=float)
        if rows.ndim == 1:
            rows = rows.reshape(1, -1)
        if rows.shape[0] == 0:
            return []
        if rows.shape[1] != self._n_features:
            raise ArityMismatchError(self._n_features, rows.shape[1])
        return self._decide(apply_normalization(self.norm, rows))

    def predict(self, x: Sequence[float]) -> str:
        return self.predict_many(np.asarray(x, dtype=float).reshape(1, -1))[0]

    @abstractmethod
    def _decide(self, rows: np.ndarray) -> List[str]:
        """Labels for rows already in the model's normalized space."""

    @abstractmethod
    def hyperparameters(self) -> Dict[str, Any]:
        ...

    @abstractmethod
    def state(self) -> Dict[str, Any]:
        """Learned state as JSON-compatible values (lists of floats)."""

    @classmethod
    @abstractmethod
    def from_state(
        cls,
        hyperparameters: Dict[str, Any],
        norm: NormalizationMode,
        state: Dict[str, Any],
    ) -> "Classifier":
        ...
