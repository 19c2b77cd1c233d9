import math

import numpy as np
import pytest

from app.shared.exceptions import ArityMismatchError, SolverConvergenceError, TrainingError
from app.modules.dataset.schemas import IndexView, OTHER, TARGET
from app.modules.dataset.service import make_rng
from app.modules.ocsvm.kernels import kernel_eval, kernel_matrix
from app.modules.ocsvm.schemas import KernelKind, KernelSpec
from app.modules.ocsvm.service import (
    _merge_small_clusters,
    fit_ocsvm_rows,
    predict_mc_ocsvm,
    predict_ocsvm,
    train_mc_ocsvm,
    train_ocsvm,
)
from app.modules.ocsvm.solver import solve_one_class_dual
from app.modules.preprocess.schemas import NormalizationMode
from conftest import make_set

GAUSSIAN = KernelSpec(kind=KernelKind.GAUSSIAN, width=1.0)


def _project_onto_capped_simplex(v: np.ndarray, cap: float) -> np.ndarray:
    """Euclidean projection onto {0 <= a <= cap, sum a = 1} by bisection on the shift."""
    low, high = v.min() - cap, v.max()
    for _ in range(100):
        shift = (low + high) / 2
        if np.clip(v - shift, 0.0, cap).sum() > 1.0:
            low = shift
        else:
            high = shift
    return np.clip(v - (low + high) / 2, 0.0, cap)


def _fista_alpha(gram: np.ndarray, nu: float, steps: int = 3000) -> np.ndarray:
    l = gram.shape[0]
    cap = 1.0 / (nu * l)
    lipschitz = float(np.linalg.eigvalsh(gram).max())
    a = np.full(l, 1.0 / l)
    y, t = a.copy(), 1.0
    for _ in range(steps):
        following = _project_onto_capped_simplex(y - (gram @ y) / lipschitz, cap)
        t_next = (1 + math.sqrt(1 + 4 * t * t)) / 2
        y = following + (t - 1) / t_next * (following - a)
        a, t = following, t_next
    return a


def _oracle_rho(gram: np.ndarray, alpha: np.ndarray, cap: float) -> float:
    gradient = gram @ alpha
    free = (alpha > 1e-9) & (alpha < cap - 1e-9)
    reference = free if free.any() else alpha > 1e-9
    return float(gradient[reference].mean())


def test_gaussian_kernel_values():
    assert kernel_eval(GAUSSIAN, (0, 0), (3, 4)) == pytest.approx(math.exp(-12.5))
    assert kernel_eval(GAUSSIAN, (1.5, -2.0), (1.5, -2.0)) == 1.0


def test_polynomial_kernel_values():
    spec = KernelSpec(kind=KernelKind.POLYNOMIAL, exponent=2)
    assert kernel_eval(spec, (1, 2), (3, 4)) == 121.0
    assert kernel_eval(spec, (1, 0), (-1, 0)) == 1.0
    with pytest.raises(TrainingError):
        kernel_eval(KernelSpec(kind=KernelKind.POLYNOMIAL, exponent=1.5), (1, 0), (-1, 0))


def test_kernel_matrix_is_symmetric_and_checks_arity():
    rows = make_rng(0).normal(size=(6, 3))
    gram = kernel_matrix(GAUSSIAN, rows, rows)
    np.testing.assert_allclose(gram, gram.T)
    with pytest.raises(ArityMismatchError):
        kernel_matrix(GAUSSIAN, rows, rows[:, :2])


@pytest.mark.parametrize("seed", range(5))
def test_dual_solution_is_feasible(seed):
    rows = make_rng(seed).normal(size=(40, 2))
    nu = 0.2
    solution = solve_one_class_dual(kernel_matrix(GAUSSIAN, rows, rows), nu, tol=1e-6)
    assert solution.alpha.sum() == pytest.approx(1.0, abs=1e-9)
    assert solution.alpha.min() >= 0.0
    assert solution.alpha.max() <= 1.0 / (nu * 40) + 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_smo_objective_history_never_increases(seed):
    rows = make_rng(seed).normal(size=(50, 2))
    history = solve_one_class_dual(kernel_matrix(GAUSSIAN, rows, rows), 0.1).objective_history
    assert all(later <= earlier + 1e-12 for earlier, later in zip(history, history[1:]))


@pytest.mark.parametrize("seed, nu", [(1, 0.1), (2, 0.3), (3, 0.5)])
def test_smo_matches_an_independent_qp_solver(seed, nu):
    rows = make_rng(seed).normal(size=(30, 2))
    gram = kernel_matrix(GAUSSIAN, rows, rows)
    solution = solve_one_class_dual(gram, nu, tol=1e-6)
    smo_objective = 0.5 * float(solution.alpha @ gram @ solution.alpha)
    oracle = _fista_alpha(gram, nu)
    assert smo_objective == pytest.approx(0.5 * float(oracle @ gram @ oracle), abs=1e-3)


@pytest.mark.parametrize("seed", range(50))
def test_smo_alphas_and_decision_values_match_a_dense_qp(seed):
    rng = make_rng(300 + seed)
    l = int(rng.integers(3, 11))
    rows = rng.normal(size=(l, 3))
    nu = float(rng.uniform(0.15, 0.95))
    gram = kernel_matrix(GAUSSIAN, rows, rows)

    solution = solve_one_class_dual(gram, nu)
    oracle = _fista_alpha(gram, nu, steps=20000)
    np.testing.assert_allclose(solution.alpha, oracle, rtol=0, atol=1e-3)

    model = fit_ocsvm_rows(rows, nu, GAUSSIAN, NormalizationMode())
    queries = np.vstack([rows, rng.normal(size=(10, 3))])
    oracle_values = kernel_matrix(GAUSSIAN, queries, rows) @ oracle - _oracle_rho(gram, oracle, 1.0 / (nu * l))
    np.testing.assert_allclose(model.decision_values(queries), oracle_values, rtol=0, atol=1e-3)


@pytest.mark.parametrize("seed", range(20))
def test_gaussian_gram_matrix_has_no_negative_eigenvalues(seed):
    rng = make_rng(seed)
    rows = rng.normal(size=(int(rng.integers(2, 40)), int(rng.integers(1, 6))))
    width = float(rng.uniform(0.1, 5.0))
    gram = kernel_matrix(KernelSpec(kind=KernelKind.GAUSSIAN, width=width), rows, rows)
    assert np.linalg.eigvalsh(gram).min() >= -1e-10


def test_nu_bounds_outliers_and_support_vectors():
    nu, rejected, supports = 0.1, [], []
    for seed in range(20):
        targets = make_rng(seed).normal(size=(200, 2))
        model = train_ocsvm(IndexView.full(make_set(targets)), nu=nu, kernel=GAUSSIAN)
        labels = model.predict_many(targets)
        rejected.append(labels.count(OTHER) / 200)
        supports.append(model.support_vectors.shape[0] / 200)
    assert np.mean(rejected) <= nu + 0.03
    assert np.mean(supports) >= nu - 0.03


def test_ocsvm_rejects_far_points(separable_view):
    model = train_ocsvm(separable_view, nu=0.1, kernel=GAUSSIAN)
    assert predict_ocsvm(model, [0.0, 0.0]) == TARGET
    assert predict_ocsvm(model, [12.0, -12.0]) == OTHER


def test_nu_equal_to_one_puts_every_point_at_the_bound():
    rows = make_rng(4).normal(size=(10, 2))
    solution = solve_one_class_dual(kernel_matrix(GAUSSIAN, rows, rows), 1.0)
    np.testing.assert_allclose(solution.alpha, np.full(10, 0.1))


def test_invalid_training_inputs():
    view = IndexView.full(make_set([[0.0, 0.0], [1.0, 1.0]]))
    for nu in (0.0, -0.1, 1.5):
        with pytest.raises(TrainingError):
            train_ocsvm(view, nu=nu)
    with pytest.raises(TrainingError):
        train_ocsvm(IndexView.full(make_set([[0.0, 0.0]])))


def test_iteration_cap_raises():
    rows = make_rng(5).normal(size=(40, 2))
    with pytest.raises(SolverConvergenceError):
        solve_one_class_dual(kernel_matrix(GAUSSIAN, rows, rows), 0.1, tol=1e-9, max_iter=1)


def _two_blobs(seed: int) -> IndexView:
    rng = make_rng(seed)
    left = rng.normal(0.0, 0.5, size=(30, 2))
    right = rng.normal(0.0, 0.5, size=(30, 2)) + [10.0, 0.0]
    return IndexView.full(make_set(np.vstack([left, right]), [[5.0, 0.0]]))


def test_multi_cluster_svm_covers_each_blob():
    model = train_mc_ocsvm(_two_blobs(1), clusters=2, nu=0.1, kernel=GAUSSIAN)
    assert len(model.members) == 2
    np.testing.assert_allclose(sorted(model.centroids[:, 0]), [0.0, 10.0], atol=0.5)
    assert predict_mc_ocsvm(model, [0.0, 0.0]) == TARGET
    assert predict_mc_ocsvm(model, [10.0, 0.0]) == TARGET
    assert predict_mc_ocsvm(model, [5.0, 0.0]) == OTHER


def test_multi_cluster_svm_with_one_cluster_matches_plain_svm():
    view = _two_blobs(2)
    single = train_mc_ocsvm(view, clusters=1, nu=0.2, kernel=GAUSSIAN)
    plain = train_ocsvm(view, nu=0.2, kernel=GAUSSIAN)
    queries = make_rng(3).uniform(-2.0, 12.0, size=(50, 2))
    assert single.predict_many(queries) == plain.predict_many(queries)


def test_small_clusters_merge_into_the_nearest():
    centroids = np.array([[0.0], [1.0], [10.0]])
    assignments = np.array([0, 0, 1, 2, 2])
    groups = _merge_small_clusters(centroids, assignments)
    assert [list(group) for group in groups] == [[0, 1, 2], [3, 4]]


def test_multi_cluster_svm_needs_two_targets_per_cluster():
    with pytest.raises(TrainingError):
        train_mc_ocsvm(IndexView.full(make_set([[0.0], [1.0], [2.0]])), clusters=2)
