import numpy as np
import pytest

from app.shared.exceptions import ArityMismatchError
from app.modules.dataset.schemas import IndexView
from app.modules.preprocess.schemas import NormalizationMode, NormKind
from app.modules.preprocess.service import (
    apply_attribute_norm,
    apply_normalization,
    fit_attribute_norm,
    fit_normalization,
    normalize_instance,
    normalize_instances,
)
from conftest import make_set


def test_instance_normalization_example():
    np.testing.assert_allclose(normalize_instance([2, 4, 6]), [0.0, 0.5, 1.0])


def test_constant_instance_maps_to_zeros():
    np.testing.assert_array_equal(normalize_instance([3, 3, 3]), [0.0, 0.0, 0.0])


def test_instance_normalization_is_shift_and_scale_invariant():
    rng = np.random.default_rng(0)
    rows = rng.normal(size=(20, 6))
    np.testing.assert_allclose(normalize_instances(rows), normalize_instances(3.0 * rows + 7.0), atol=1e-12)
    normalized = normalize_instances(rows)
    np.testing.assert_allclose(normalized.min(axis=1), 0.0)
    np.testing.assert_allclose(normalized.max(axis=1), 1.0)


def test_attribute_norm_uses_training_range_only():
    train = IndexView.full(make_set([[0.0, 10.0], [2.0, 30.0]], [[1.0, 20.0]]))
    mode = fit_attribute_norm(train)
    assert mode.kind == NormKind.PER_ATTRIBUTE
    assert mode.minima == (0.0, 10.0)
    assert mode.maxima == (2.0, 30.0)
    # no clamping outside the training range
    np.testing.assert_allclose(apply_attribute_norm(mode, [4.0, 0.0]), [2.0, -0.5])


def test_constant_training_column_normalizes_to_zero():
    train = IndexView.full(make_set([[5.0, 1.0], [5.0, 3.0]]))
    mode = fit_attribute_norm(train)
    np.testing.assert_allclose(apply_attribute_norm(mode, [9.0, 2.0]), [0.0, 0.5])


def test_attribute_norm_checks_arity():
    mode = fit_attribute_norm(IndexView.full(make_set([[0.0, 1.0], [1.0, 2.0]])))
    with pytest.raises(ArityMismatchError):
        apply_attribute_norm(mode, [1.0, 2.0, 3.0])


def test_fit_normalization_dispatches_on_kind():
    view = IndexView.full(make_set([[0.0, 1.0], [1.0, 2.0]]))
    assert fit_normalization(NormKind.NONE, view) == NormalizationMode()
    assert fit_normalization(NormKind.PER_INSTANCE, view).kind == NormKind.PER_INSTANCE
    assert fit_normalization(NormKind.PER_ATTRIBUTE, view).minima == (0.0, 1.0)


def test_none_mode_leaves_rows_untouched():
    rows = np.array([[1.0, -2.0], [3.5, 4.0]])
    np.testing.assert_array_equal(apply_normalization(NormalizationMode(), rows), rows)


def test_mode_validates_fitted_columns():
    with pytest.raises(ValueError):
        NormalizationMode(kind=NormKind.PER_ATTRIBUTE, minima=(0.0,), maxima=(1.0, 2.0))
