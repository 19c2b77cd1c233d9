"""
SMO solver for the one-class SVM dual.

    minimise    1/2 a^T Q a
    subject to  0 <= a_i <= 1 / (nu l),   sum a_i = 1

The solver works on the scaled variables b = nu l a, so the box is [0, 1]
and the equality constraint is sum b_i = nu l. Each step moves one
maximal-violating pair (i, j) along the feasible direction and keeps the
gradient G = Q b up to date.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from app.core.config import settings
from app.shared.exceptions import SolverConvergenceError

logger = logging.getLogger(__name__)

MIN_CURVATURE = 1e-12


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray              # unscaled, sums to 1
    rho: float
    objective_history: Tuple[float, ...]
    iterations: int


def _initial_point(l: int, nu: float) -> np.ndarray:
    budget = nu * l
    full = int(np.floor(budget))
    beta = np.zeros(l)
    beta[:full] = 1.0
    if full < l:
        beta[full] = budget - full
    return beta


def solve_one_class_dual(
    gram: np.ndarray,
    nu: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> DualSolution:
    """
    Solve the dual for a precomputed Gram matrix.

    Raises SolverConvergenceError when `max_iter` steps (default
    SVM_MAX_PASSES x l) pass without the KKT gap dropping below `tol`.
    """
    l = gram.shape[0]
    tol = settings.SVM_TOLERANCE if tol is None else tol
    max_iter = settings.SVM_MAX_PASSES * l if max_iter is None else max_iter
    scale = nu * l

    beta = _initial_point(l, nu)
    gradient = gram @ beta
    history = [0.5 * float(beta @ gradient) / (scale * scale)]

    iterations = 0
    while True:
        up = np.flatnonzero(beta < 1.0)
        low = np.flatnonzero(beta > 0.0)
        if up.size == 0 or low.size == 0:
            break
        i = up[np.argmin(gradient[up])]
        j = low[np.argmax(gradient[low])]
        if gradient[j] - gradient[i] < tol:
            break
        if iterations >= max_iter:
            raise SolverConvergenceError(
                f"SMO did not reach KKT tolerance {tol} within {max_iter} steps "
                f"(gap {gradient[j] - gradient[i]:.3g})"
            )

        curvature = gram[i, i] + gram[j, j] - 2.0 * gram[i, j]
        if curvature <= 0:
            curvature = MIN_CURVATURE
        step = (gradient[j] - gradient[i]) / curvature

        old_i, old_j = beta[i], beta[j]
        pair_total = old_i + old_j
        if step >= 1.0 - old_i and 1.0 - old_i <= old_j:
            beta[i] = 1.0
            beta[j] = pair_total - 1.0
        elif step >= old_j:
            beta[j] = 0.0
            beta[i] = pair_total
        else:
            beta[i] = old_i + step
            beta[j] = old_j - step

        gradient += gram[:, i] * (beta[i] - old_i) + gram[:, j] * (beta[j] - old_j)
        history.append(0.5 * float(beta @ gradient) / (scale * scale))
        iterations += 1

    free = (beta > 0.0) & (beta < 1.0)
    support = beta > 0.0
    reference = free if free.any() else support
    rho_scaled = float(gradient[reference].mean())

    logger.debug(
        f"SMO converged after {iterations} steps: {int(support.sum())} support vectors, "
        f"{int(free.sum())} unbounded"
    )
    return DualSolution(
        alpha=beta / scale,
        rho=rho_scaled / scale,
        objective_history=tuple(history),
        iterations=iterations,
    )
