"""
One-class SVM training and the multi-cluster variant built on it.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from app.shared.exceptions import TrainingError
from app.modules.dataset.schemas import IndexView
from app.modules.dataset.service import targets_of
from app.modules.kmeans.service import lloyd
from app.modules.ocsvm.kernels import kernel_matrix
from app.modules.ocsvm.models import McOcSvmModel, OcSvmModel
from app.modules.ocsvm.schemas import KernelKind, KernelSpec
from app.modules.ocsvm.solver import solve_one_class_dual
from app.modules.preprocess.schemas import NormalizationMode, NormKind
from app.modules.preprocess.service import apply_normalization, fit_normalization

logger = logging.getLogger(__name__)


def _check_nu(nu: float) -> None:
    if not 0 < nu <= 1:
        raise TrainingError(f"nu must lie in (0, 1], got {nu}")


def fit_ocsvm_rows(
    rows: np.ndarray,
    nu: float,
    kernel: KernelSpec,
    norm: NormalizationMode,
    tol: Optional[float] = None,
) -> OcSvmModel:
    """Train on rows that are already normalized; `norm` is only recorded."""
    _check_nu(nu)
    l = rows.shape[0]
    if l < 2:
        raise TrainingError(f"a one-class SVM needs at least 2 targets, got {l}")

    gram = kernel_matrix(kernel, rows, rows)
    solution = solve_one_class_dual(gram, nu, tol=tol)
    support = solution.alpha > 0
    return OcSvmModel(
        support_vectors=rows[support],
        alpha=solution.alpha[support],
        rho=solution.rho,
        nu=nu,
        kernel=kernel,
        norm=norm,
        training_size=l,
        objective_history=solution.objective_history,
    )


def train_ocsvm(
    targets: IndexView,
    nu: float = 0.01,
    kernel: Optional[KernelSpec] = None,
    norm: NormKind = NormKind.NONE,
    tol: Optional[float] = None,
) -> OcSvmModel:
    """
    Train a one-class SVM on the Target rows of `targets`.

    `tol` overrides the SMO KKT tolerance from settings.
    """
    kernel = kernel or KernelSpec()
    _check_nu(nu)
    if kernel.kind == KernelKind.POLYNOMIAL:
        logger.warning("Polynomial kernel used for one-class training; results depend on vector norms")
    view = targets_of(targets)
    if len(view) < 2:
        raise TrainingError(f"a one-class SVM needs at least 2 targets, got {len(view)}")
    mode = fit_normalization(NormKind(norm), view)
    model = fit_ocsvm_rows(apply_normalization(mode, view.features()), nu, kernel, mode, tol)
    logger.debug(
        f"One-class SVM: {model.support_vectors.shape[0]}/{len(view)} support vectors, rho={model.rho}"
    )
    return model


def predict_ocsvm(model: OcSvmModel, x: Sequence[float]) -> str:
    return model.predict(x)


def _merge_small_clusters(centroids: np.ndarray, assignments: np.ndarray) -> List[np.ndarray]:
    """
    Member index lists per cluster, folding clusters with fewer than 2
    members into the cluster with the nearest centroid.
    """
    groups = {c: np.flatnonzero(assignments == c) for c in range(centroids.shape[0])}
    centres = {c: centroids[c] for c in groups}
    while len(groups) > 1:
        small = [c for c in sorted(groups) if len(groups[c]) < 2]
        if not small:
            break
        victim = small[0]
        others = [c for c in sorted(groups) if c != victim]
        gaps = [float(np.sum((centres[c] - centres[victim]) ** 2)) for c in others]
        host = others[int(np.argmin(gaps))]
        groups[host] = np.sort(np.concatenate([groups[host], groups.pop(victim)]))
        centres.pop(victim)
        logger.debug(f"Merged cluster {victim} into cluster {host}")
    return [groups[c] for c in sorted(groups)]


def train_mc_ocsvm(
    targets: IndexView,
    clusters: int = 1,
    nu: float = 0.01,
    kernel: Optional[KernelSpec] = None,
    seed: int = 2,
    norm: NormKind = NormKind.NONE,
    tol: Optional[float] = None,
) -> McOcSvmModel:
    """Cluster the targets with k-means, then fit one one-class SVM per cluster."""
    kernel = kernel or KernelSpec()
    _check_nu(nu)
    if kernel.kind == KernelKind.POLYNOMIAL:
        logger.warning("Polynomial kernel used for one-class training; results depend on vector norms")
    view = targets_of(targets)
    if clusters < 1:
        raise TrainingError(f"the number of clusters must be at least 1, got {clusters}")
    if len(view) < 2 * clusters:
        raise TrainingError(
            f"{clusters} clusters need at least {2 * clusters} targets, got {len(view)}"
        )

    mode = fit_normalization(NormKind(norm), view)
    rows = apply_normalization(mode, view.features())
    result = lloyd(rows, clusters, seed)
    groups = _merge_small_clusters(result.centroids, result.assignments)

    inner = NormalizationMode()
    members = [fit_ocsvm_rows(rows[group], nu, kernel, inner, tol) for group in groups]
    centroids = np.vstack([rows[group].mean(axis=0) for group in groups])
    logger.debug(f"Multi-cluster SVM trained with {len(members)} of {clusters} requested clusters")
    return McOcSvmModel(centroids, members, nu, kernel, mode)


def predict_mc_ocsvm(model: McOcSvmModel, x: Sequence[float]) -> str:
    return model.predict(x)
