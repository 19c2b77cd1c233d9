import numpy as np
import pytest

from app.shared.exceptions import TrainingError
from app.modules.dataset.schemas import IndexView, OTHER, TARGET
from app.modules.dataset.service import make_rng
from app.modules.kmeans.service import lloyd, predict_kmeans, train_kmeans
from app.modules.metrics.schemas import DistanceMetric
from conftest import gaussian_set, make_set

TWO_GROUPS = [[-1.0], [0.0], [1.0], [9.0], [10.0], [11.0]]


@pytest.mark.parametrize("seed", range(10))
def test_objective_never_increases(seed):
    rows = make_rng(seed).normal(size=(60, 3))
    history = lloyd(rows, clusters=5, seed=seed).objective_history
    assert all(later <= earlier + 1e-9 for earlier, later in zip(history, history[1:]))


def test_lloyd_is_deterministic_for_a_seed():
    rows = make_rng(1).normal(size=(50, 2))
    a, b = lloyd(rows, 4, seed=2), lloyd(rows, 4, seed=2)
    np.testing.assert_array_equal(a.centroids, b.centroids)
    np.testing.assert_array_equal(a.assignments, b.assignments)


@pytest.mark.parametrize("seed", range(10))
def test_two_groups_give_centroids_at_their_means(seed):
    model = train_kmeans(IndexView.full(make_set(TWO_GROUPS, [[5.0]])), clusters=2, seed=seed, threshold=1.5)
    np.testing.assert_allclose(sorted(model.centroids[:, 0]), [0.0, 10.0])
    assert predict_kmeans(model, [1.4]) == TARGET
    assert predict_kmeans(model, [1.6]) == OTHER
    assert predict_kmeans(model, [5.0]) == OTHER
    assert predict_kmeans(model, [11.4]) == TARGET


def test_larger_threshold_accepts_a_superset(separable_view):
    queries = make_rng(3).normal(2.0, 3.0, size=(100, 2))
    accepted = []
    for threshold in (0.5, 1.0, 2.0, 4.0):
        model = train_kmeans(separable_view, clusters=3, seed=2, threshold=threshold)
        accepted.append({i for i, label in enumerate(model.predict_many(queries)) if label == TARGET})
    for smaller, larger in zip(accepted, accepted[1:]):
        assert smaller <= larger


def test_metric_changes_only_the_prediction_distance():
    view = IndexView.full(make_set([[0.0, 0.0]]))
    model = train_kmeans(view, clusters=1, threshold=1.5, metric=DistanceMetric.MANHATTAN)
    # Euclidean 1.41, Manhattan 2
    assert model.predict([1.0, 1.0]) == OTHER


def test_iteration_cap_is_respected():
    rows = make_rng(0).normal(size=(200, 2))
    assert lloyd(rows, 8, seed=0, max_iter=1).iterations <= 1


def test_too_many_clusters():
    with pytest.raises(TrainingError):
        train_kmeans(IndexView.full(gaussian_set(seed=1, n_target=3, n_other=5)), clusters=4)
    with pytest.raises(TrainingError):
        lloyd(np.zeros((3, 2)), clusters=0, seed=1)
