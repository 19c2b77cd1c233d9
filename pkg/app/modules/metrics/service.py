"""
Distance metrics and classification performance measures.
"""

import logging
from typing import List, Sequence

import numpy as np

from app.shared.exceptions import ArityMismatchError, DistanceError, EvaluationError
from app.modules.dataset.schemas import OTHER, TARGET
from app.modules.metrics.schemas import (
    ConfusionMatrix,
    DistanceMetric,
    EvalReport,
    MetricSummary,
    ReportSummary,
)

logger = logging.getLogger(__name__)

RATE_NAMES = ("error", "sensitivity", "specificity", "bar", "ber")
COSINE_ROUNDING = 8 * np.finfo(float).eps


def _rows_to_stored(metric: DistanceMetric, x: np.ndarray, stored: np.ndarray) -> np.ndarray:
    diff = stored - x
    if metric == DistanceMetric.EUCLIDEAN:
        return np.sqrt(np.sum(diff * diff, axis=1))
    if metric == DistanceMetric.MANHATTAN:
        return np.sum(np.abs(diff), axis=1)

    x_norm = np.linalg.norm(x)
    stored_norms = np.linalg.norm(stored, axis=1)
    if x_norm == 0 or np.any(stored_norms == 0):
        raise DistanceError("cosine distance is undefined for a zero vector")
    similarity = (stored @ x) / (stored_norms * x_norm)
    out = np.maximum(0.0, 1.0 - similarity)
    # rounding leaves a few ulps behind for parallel rows; d(x, x) must be exactly 0
    out[out <= COSINE_ROUNDING] = 0.0
    out[np.all(stored == x, axis=1)] = 0.0
    return out


def distance(metric: DistanceMetric, a: Sequence[float], b: Sequence[float]) -> float:
    """
    Distance between two vectors; cosine is reported as 1 - similarity.

    Example:
        distance(DistanceMetric.EUCLIDEAN, (0, 0), (3, 4)) -> 5.0
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArityMismatchError(a.shape[0], b.shape[0])
    return float(_rows_to_stored(DistanceMetric(metric), a, b.reshape(1, -1))[0])


def pairwise_distances(metric: DistanceMetric, queries: np.ndarray, stored: np.ndarray) -> np.ndarray:
    """(n, m) matrix of distances from each query row to each stored row."""
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    stored = np.atleast_2d(np.asarray(stored, dtype=float))
    if queries.shape[1] != stored.shape[1]:
        raise ArityMismatchError(stored.shape[1], queries.shape[1])
    metric = DistanceMetric(metric)
    out = np.empty((queries.shape[0], stored.shape[0]))
    for row, x in enumerate(queries):
        out[row] = _rows_to_stored(metric, x, stored)
    return out


def confusion_matrix(predictions: Sequence[str], truths: Sequence[str]) -> ConfusionMatrix:
    if len(predictions) != len(truths):
        raise EvaluationError(
            f"{len(predictions)} predictions cannot be scored against {len(truths)} truths"
        )
    counts = {"tp": 0, "fn": 0, "fp": 0, "tn": 0}
    for predicted, truth in zip(predictions, truths):
        if predicted not in (TARGET, OTHER) or truth not in (TARGET, OTHER):
            raise EvaluationError(f"labels must be Target or Other, got ({predicted}, {truth})")
        if truth == TARGET:
            counts["tp" if predicted == TARGET else "fn"] += 1
        else:
            counts["fp" if predicted == TARGET else "tn"] += 1
    return ConfusionMatrix(**counts)


def evaluate_matrix(matrix: ConfusionMatrix) -> EvalReport:
    """
    Rates for a confusion matrix. A rate whose denominator is zero is
    defined as 1 and the report is flagged degenerate.

    Example:
        evaluate_matrix(ConfusionMatrix(tp=17, fn=4, fp=2, tn=5)).error -> 0.21428571428571427
    """
    if matrix.total == 0:
        raise EvaluationError("cannot evaluate an empty set of predictions")

    degenerate = False
    positives = matrix.tp + matrix.fn
    negatives = matrix.tn + matrix.fp
    if positives:
        sensitivity = matrix.tp / positives
    else:
        sensitivity, degenerate = 1.0, True
    if negatives:
        specificity = matrix.tn / negatives
    else:
        specificity, degenerate = 1.0, True
    if degenerate:
        logger.warning(
            f"Degenerate evaluation: {positives} Target and {negatives} Other examples in the test slice"
        )

    bar = (sensitivity + specificity) / 2
    return EvalReport(
        matrix=matrix,
        error=(matrix.fp + matrix.fn) / matrix.total,
        sensitivity=sensitivity,
        specificity=specificity,
        bar=bar,
        ber=1 - bar,
        degenerate=degenerate,
    )


def evaluate(predictions: Sequence[str], truths: Sequence[str]) -> EvalReport:
    return evaluate_matrix(confusion_matrix(predictions, truths))


def average_reports(reports: Sequence[EvalReport]) -> EvalReport:
    """
    One report for several test slices: counts are summed, every rate is
    the plain mean of the slices' rates.
    """
    if not reports:
        raise EvaluationError("no reports to average")
    matrix = ConfusionMatrix()
    for report in reports:
        matrix = matrix + report.matrix
    rates = {
        name: float(np.mean([getattr(report, name) for report in reports]))
        for name in RATE_NAMES
    }
    return EvalReport(matrix=matrix, degenerate=any(r.degenerate for r in reports), **rates)


def summarize(reports: Sequence[EvalReport]) -> ReportSummary:
    """Mean and sample standard deviation (ddof=1, 0 for one report) of every rate."""
    if not reports:
        raise EvaluationError("no reports to summarize")

    def _summary(name: str) -> MetricSummary:
        values = np.array([getattr(report, name) for report in reports], dtype=float)
        std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
        return MetricSummary(mean=float(values.mean()), std=std)

    return ReportSummary(count=len(reports), **{name: _summary(name) for name in RATE_NAMES})


def render_confusion_matrix(matrix: ConfusionMatrix) -> str:
    """Console/log table: rows are true classes, columns are predictions."""
    width = 20
    rule = "|" + "|".join(["-" * width] * 3) + "|"

    def _row(*cells) -> str:
        return "|" + "|".join(f" {str(cell):<{width - 1}}" for cell in cells) + "|"

    lines: List[str] = [
        rule,
        _row("", "Target predictions", "Other Predictions"),
        rule,
        _row("Target", matrix.tp, matrix.fn),
        rule,
        _row("Other", matrix.fp, matrix.tn),
        rule,
    ]
    return "\n".join(lines)
