"""
Instance-wise and attribute-wise min-max normalization.

A degenerate range (max == min) maps to zeros and is logged.
"""

import logging
from typing import Sequence

import numpy as np

from app.shared.exceptions import ArityMismatchError
from app.modules.dataset.schemas import IndexView
from app.modules.preprocess.schemas import NormalizationMode, NormKind

logger = logging.getLogger(__name__)


def normalize_instance(x: Sequence[float]) -> np.ndarray:
    """
    Rescale one vector into [0, 1] by its own minimum and maximum.

    Example:
        normalize_instance([2, 4, 6]) -> [0.0, 0.5, 1.0]
    """
    vector = np.asarray(x, dtype=float)
    if vector.size == 0:
        raise ValueError("cannot normalize an empty vector")
    low, high = vector.min(), vector.max()
    if high == low:
        logger.warning("Constant instance normalized to zeros")
        return np.zeros_like(vector)
    return (vector - low) / (high - low)


def normalize_instances(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] == 0:
        return rows.copy()
    low = rows.min(axis=1, keepdims=True)
    span = rows.max(axis=1, keepdims=True) - low
    degenerate = span[:, 0] == 0
    if degenerate.any():
        logger.warning(f"{int(degenerate.sum())} constant instance(s) normalized to zeros")
    safe = np.where(span == 0, 1.0, span)
    return np.where(span == 0, 0.0, (rows - low) / safe)


def fit_attribute_norm(train: IndexView) -> NormalizationMode:
    """Per-column (min, max) from the training view only."""
    rows = train.features()
    if rows.shape[0] == 0:
        raise ValueError("cannot fit attribute normalization on an empty view")
    minima = rows.min(axis=0)
    maxima = rows.max(axis=0)
    constant = np.flatnonzero(minima == maxima)
    if constant.size:
        logger.warning(f"Constant training column(s) {constant.tolist()} will normalize to zero")
    return NormalizationMode(
        kind=NormKind.PER_ATTRIBUTE,
        minima=tuple(float(v) for v in minima),
        maxima=tuple(float(v) for v in maxima),
    )


def apply_attribute_norm(mode: NormalizationMode, x: Sequence[float]) -> np.ndarray:
    """Column j -> (v - min_j) / (max_j - min_j); values outside the training range are not clamped."""
    return _apply_attribute_rows(mode, np.asarray(x, dtype=float).reshape(1, -1))[0]


def _apply_attribute_rows(mode: NormalizationMode, rows: np.ndarray) -> np.ndarray:
    if rows.shape[1] != len(mode.minima):
        raise ArityMismatchError(len(mode.minima), rows.shape[1])
    low = np.asarray(mode.minima, dtype=float)
    span = np.asarray(mode.maxima, dtype=float) - low
    safe = np.where(span == 0, 1.0, span)
    return np.where(span == 0, 0.0, (rows - low) / safe)


def fit_normalization(kind: NormKind, train: IndexView) -> NormalizationMode:
    if kind == NormKind.PER_ATTRIBUTE:
        return fit_attribute_norm(train)
    return NormalizationMode(kind=kind)


def apply_normalization(mode: NormalizationMode, rows: np.ndarray) -> np.ndarray:
    """Transform a (n, d) array of rows with a fitted mode."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    if mode.kind == NormKind.PER_INSTANCE:
        return normalize_instances(rows)
    if mode.kind == NormKind.PER_ATTRIBUTE:
        return _apply_attribute_rows(mode, rows)
    return rows
