"""Kernel functions for the one-class SVM."""

from typing import Sequence

import numpy as np

from app.shared.exceptions import ArityMismatchError, TrainingError
from app.modules.ocsvm.schemas import KernelKind, KernelSpec


def gaussian_kernel_matrix(a: np.ndarray, b: np.ndarray, width: float) -> np.ndarray:
    """
    exp(-|a_i - b_j|^2 / (2 width^2)) for every row pair.

    Squared distances come from row differences so K(x, x) is exactly 1.
    """
    out = np.empty((a.shape[0], b.shape[0]))
    scale = 2.0 * width * width
    for j, column in enumerate(b):
        diff = a - column
        out[:, j] = np.exp(-np.sum(diff * diff, axis=1) / scale)
    return out


def polynomial_kernel_matrix(a: np.ndarray, b: np.ndarray, exponent: float) -> np.ndarray:
    """<a_i, b_j>^exponent for every row pair."""
    dots = a @ b.T
    if float(exponent).is_integer():
        return dots ** int(exponent)
    if np.any(dots < 0):
        raise TrainingError(
            f"polynomial kernel with non-integer exponent {exponent} is undefined for negative dot products"
        )
    return dots ** exponent


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[1] != b.shape[1]:
        raise ArityMismatchError(b.shape[1], a.shape[1])
    if spec.kind == KernelKind.GAUSSIAN:
        return gaussian_kernel_matrix(a, b, spec.width)
    return polynomial_kernel_matrix(a, b, spec.exponent)


def kernel_eval(spec: KernelSpec, x: Sequence[float], y: Sequence[float]) -> float:
    """
    Kernel value for one pair of vectors.

    Example:
        kernel_eval(KernelSpec(kind="g", width=1.0), (0, 0), (3, 4)) -> exp(-12.5)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ArityMismatchError(x.shape[0], y.shape[0])
    return float(kernel_matrix(spec, x.reshape(1, -1), y.reshape(1, -1))[0, 0])
