from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.shared.classifier import Classifier
from app.modules.dataset.schemas import OTHER, TARGET
from app.modules.ocsvm.kernels import kernel_matrix
from app.modules.ocsvm.schemas import KernelKind, KernelSpec
from app.modules.preprocess.schemas import NormalizationMode
from app.modules.preprocess.service import apply_normalization


def kernel_hyperparameters(nu: float, kernel: KernelSpec) -> Dict[str, Any]:
    return {
        "width": kernel.width,
        "nu": nu,
        "kernel": kernel.kind.value,
        "exponent": kernel.exponent,
    }


def kernel_from_hyperparameters(hyperparameters: Dict[str, Any]) -> KernelSpec:
    return KernelSpec(
        kind=KernelKind(hyperparameters.get("kernel", KernelKind.GAUSSIAN.value)),
        width=hyperparameters.get("width", 1.0),
        exponent=hyperparameters.get("exponent", 1.0),
    )


class OcSvmModel(Classifier):
    """f(x) = sum_i alpha_i K(sv_i, x) - rho; Target iff f(x) >= 0."""

    algorithm = "SVM"

    def __init__(
        self,
        support_vectors: np.ndarray,
        alpha: Sequence[float],
        rho: float,
        nu: float,
        kernel: KernelSpec,
        norm: NormalizationMode,
        training_size: int,
        objective_history: Tuple[float, ...] = (),
    ):
        support_vectors = np.array(support_vectors, dtype=float)
        super().__init__(support_vectors.shape[1], norm)
        support_vectors.setflags(write=False)
        self.support_vectors = support_vectors
        self.alpha = np.array(alpha, dtype=float)
        self.alpha.setflags(write=False)
        self.rho = float(rho)
        self.nu = float(nu)
        self.kernel = kernel
        self.training_size = int(training_size)
        self.objective_history = tuple(objective_history)

    @property
    def upper_bound(self) -> float:
        return 1.0 / (self.nu * self.training_size)

    def decision_values(self, rows: np.ndarray) -> np.ndarray:
        """Decision values for rows already in the normalized space."""
        return kernel_matrix(self.kernel, rows, self.support_vectors) @ self.alpha - self.rho

    def decision_function(self, rows: np.ndarray) -> np.ndarray:
        return self.decision_values(apply_normalization(self.norm, rows))

    def _decide(self, rows: np.ndarray) -> List[str]:
        slack = -settings.SVM_DECISION_TOLERANCE
        return [TARGET if f >= slack else OTHER for f in self.decision_values(rows)]

    def hyperparameters(self) -> Dict[str, Any]:
        return kernel_hyperparameters(self.nu, self.kernel)

    def state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "support_vectors": self.support_vectors.tolist(),
            "alpha": self.alpha.tolist(),
            "rho": self.rho,
            "training_size": self.training_size,
        }

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "OcSvmModel":
        return cls(
            np.asarray(state["support_vectors"], dtype=float).reshape(-1, state["n_features"]),
            state["alpha"],
            state["rho"],
            hyperparameters["nu"],
            kernel_from_hyperparameters(hyperparameters),
            norm,
            state["training_size"],
        )


class McOcSvmModel(Classifier):
    """One one-class SVM per k-means cluster of the targets; Target if any accepts."""

    algorithm = "MCSVM"

    def __init__(
        self,
        centroids: np.ndarray,
        members: Sequence[OcSvmModel],
        nu: float,
        kernel: KernelSpec,
        norm: NormalizationMode,
    ):
        centroids = np.array(centroids, dtype=float)
        super().__init__(centroids.shape[1], norm)
        centroids.setflags(write=False)
        self.centroids = centroids
        self.members = tuple(members)
        self.nu = float(nu)
        self.kernel = kernel

    @property
    def clusters(self) -> List[Tuple[np.ndarray, OcSvmModel]]:
        return list(zip(self.centroids, self.members))

    def _decide(self, rows: np.ndarray) -> List[str]:
        slack = -settings.SVM_DECISION_TOLERANCE
        accepted = np.zeros(rows.shape[0], dtype=bool)
        for member in self.members:
            accepted |= member.decision_values(rows) >= slack
        return [TARGET if flag else OTHER for flag in accepted]

    def hyperparameters(self) -> Dict[str, Any]:
        return {"clusters": len(self.members), **kernel_hyperparameters(self.nu, self.kernel)}

    def state(self) -> Dict[str, Any]:
        return {
            "n_features": self.n_features,
            "clusters": [
                {"centroid": centroid.tolist(), "svm": member.state()}
                for centroid, member in self.clusters
            ],
        }

    @classmethod
    def from_state(cls, hyperparameters, norm, state) -> "McOcSvmModel":
        kernel = kernel_from_hyperparameters(hyperparameters)
        inner_norm = NormalizationMode()
        members = [
            OcSvmModel.from_state(hyperparameters, inner_norm, entry["svm"])
            for entry in state["clusters"]
        ]
        centroids = np.asarray(
            [entry["centroid"] for entry in state["clusters"]], dtype=float
        ).reshape(-1, state["n_features"])
        return cls(centroids, members, hyperparameters["nu"], kernel, norm)
