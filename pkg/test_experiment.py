from pathlib import Path

import numpy as np
import pytest

from app.core.config import settings
from app.shared.exceptions import ModelFormatError, ModelVersionError, RelabelError, TrainingError
from app.modules.arff.service import parse_arff, relabel
from app.modules.dataset.schemas import IndexView
from app.modules.dataset.service import make_rng
from app.modules.experiment.grid import default_grid, parse_param_grid, render_grid_echo
from app.modules.experiment.logbook import render_experiment_echo, render_params
from app.modules.experiment.registry import ALGORITHMS, get_algorithm
from app.modules.experiment.schemas import (
    ExperimentConfig,
    ParamGrid,
    SplitConfig,
    SplitMethod,
    Technique,
)
from app.modules.experiment.serialization import dumps_model, load_model, loads_model, save_model
from app.modules.experiment.service import (
    ExperimentService,
    model_selection,
    performance_estimation,
    train_final_classifier,
)
from app.modules.preprocess.schemas import NormKind
from conftest import MINI_IRIS_ARFF, gaussian_set

KNN = get_algorithm("KNN")


def _knn_grid(**values) -> ParamGrid:
    base = {"m": [3], "k": [3], "threshold": [1.5], "metric": ["e"]}
    base.update(values)
    return ParamGrid(values=base)


def test_sequences_expand_exactly():
    grid = parse_param_grid("-M sequence 1 1 7 -K sequence 1 1 7 -T sequence 1.0 1.0 5.0", "KNN")
    assert grid.values["m"] == [1, 2, 3, 4, 5, 6, 7]
    assert grid.values["k"] == [1, 2, 3, 4, 5, 6, 7]
    assert grid.values["threshold"] == [1.0, 2.0, 3.0, 4.0, 5.0]
    assert grid.values["metric"] == ["e"]
    assert grid.size == 7 * 7 * 5
    assert not grid.notifications


def test_individual_values_keep_their_order():
    grid = parse_param_grid("-D individual e c m", "KNN")
    assert grid.values["metric"] == ["e", "c", "m"]


def test_sequence_stops_at_the_last_value_below_end():
    grid = parse_param_grid("-T sequence 1.0 0.5 2.2", "KMEANS")
    assert grid.values["threshold"] == [1.0, 1.5, 2.0]


@pytest.mark.parametrize(
    "text",
    [
        "-M sequence 1 0 7",
        "-M sequence 1 1",
        "-M sequence 7 1 1",
        "-M individual",
        "-M individual 0",
        "-M repeat 1 2",
        "-D sequence e c m",
        "-D individual x",
    ],
)
def test_malformed_groups_fall_back_to_the_default(text):
    grid = parse_param_grid(text, "KNN")
    assert grid.values == default_grid("KNN").values
    assert len(grid.notifications) == 1


def test_unknown_switch_and_stray_text_are_reported():
    grid = parse_param_grid("oops -Q individual 1 -M individual 4", "KNN")
    assert grid.values["m"] == [4]
    assert len(grid.notifications) == 2


@pytest.mark.parametrize("seed", range(20))
def test_garbage_never_crashes(seed):
    vocabulary = ["-M", "-K", "-T", "-D", "-Z", "individual", "sequence", "1", "-3", "2.5", "e", "c", "x", "0"]
    rng = make_rng(seed)
    tokens = [vocabulary[i] for i in rng.integers(0, len(vocabulary), size=12)]
    grid = parse_param_grid(tokens, "KNN")
    assert set(grid.values) == {"m", "k", "threshold", "metric"}
    assert all(grid.values.values())


def test_defaults_per_algorithm():
    assert default_grid("SVM").values == {"width": [1.0], "nu": [0.01], "kernel": ["g"], "exponent": [1.0]}
    assert default_grid("MCSVM").values["clusters"] == [2]
    assert default_grid("BKNN").values == {"k": [1], "metric": ["e"]}
    with pytest.raises(TrainingError):
        get_algorithm("bogus")


def test_grid_echo_lists_resolved_values():
    grid = parse_param_grid("-M individual 1 3 7 -K sequence 1 1 5", "KNN")
    lines = render_grid_echo(grid, KNN).splitlines()
    assert lines[0] == "KNN Classifier Options selected:-"
    m_line = next(line for line in lines if "(M neighbours used)" in line)
    k_line = next(line for line in lines if "(K neighbours of M)" in line)
    assert m_line.endswith("---> 1 3 7")
    assert k_line.endswith("---> 1 2 3 4 5")


def test_params_render_with_labels():
    params = {"m": 4, "k": 4, "threshold": 4.0, "metric": "c"}
    assert render_params(params, KNN) == "M: 4 K: 4 Threshold: 4.0 Dist metric: c"


def test_config_defaults():
    config = ExperimentConfig(example_set_path="iris.arff")
    assert (config.algorithm, config.technique, config.outer.method) == ("KNN", Technique.PERFORMANCE_ESTIMATION, SplitMethod.PERCENTAGE)
    assert (config.runs, config.seed, config.outer.percent, config.outer.folds) == (1, 2, 50.0, 3)
    assert (config.inner.method, config.inner.percent, config.inner.folds) == (SplitMethod.PERCENTAGE, 50.0, 3)
    with pytest.raises(ValueError):
        ExperimentConfig(example_set_path="iris.arff", relabel=True)


def test_experiment_echo_shows_zero_folds_for_percentage_split():
    text = render_experiment_echo(ExperimentConfig(example_set_path="iris.arff"))
    assert "-E (Example set path)" in text
    assert next(line for line in text.splitlines() if line.startswith("-F")).endswith("---> 0")
    assert next(line for line in text.splitlines() if line.startswith("-P")).endswith("---> 50.0")


def test_selection_keeps_the_first_of_tied_combinations(separable_view):
    # both thresholds accept everything, so every split scores the same
    grid = _knn_grid(threshold=[100.0, 200.0])
    for _ in range(2):
        result = model_selection(separable_view, KNN, grid, SplitConfig(), seed=2)
        assert result.best_params["threshold"] == 100.0
        assert result.trials[0].error == result.trials[1].error


def test_selection_prefers_the_smaller_error(separable_view):
    result = model_selection(separable_view, KNN, _knn_grid(threshold=[1000.0, 1.5]), SplitConfig(), seed=2)
    assert result.best_params["threshold"] == 1.5
    assert result.best_error < result.trials[0].error


def test_selection_skips_combinations_that_cannot_train(separable_view):
    result = model_selection(separable_view, KNN, _knn_grid(m=[100, 3]), SplitConfig(), seed=2)
    assert result.trials[0].error is None and result.trials[0].failed
    assert result.best_params["m"] == 3


def test_selection_fails_when_nothing_trains(separable_view):
    with pytest.raises(TrainingError):
        model_selection(separable_view, KNN, _knn_grid(m=[100]), SplitConfig(), seed=2)


def test_streamed_trials_arrive_in_grid_order(separable_view):
    seen = []
    grid = _knn_grid(threshold=[1.0, 1.5, 2.0])
    model_selection(separable_view, KNN, grid, SplitConfig(method="cv", folds=3), seed=2, on_trial=seen.append)
    assert [trial.params["threshold"] for trial in seen] == [1.0, 1.5, 2.0]


def test_runs_use_consecutive_seeds(separable_set, tmp_path):
    config = ExperimentConfig(example_set_path=str(tmp_path / "unused.arff"), runs=3, seed=5)
    result = performance_estimation(separable_set, config)
    assert [run.seed for run in result.runs] == [5, 6, 7]
    assert result.summary.count == 3


def test_performance_estimation_uses_the_first_grid_value(separable_set):
    config = ExperimentConfig(example_set_path="x.arff", grid=_knn_grid(threshold=[1.5, 3.0]), runs=2)
    result = performance_estimation(separable_set, config)
    assert all(fold.params["threshold"] == 1.5 for run in result.runs for fold in run.folds)
    assert result.best_params is None


def test_cross_validation_tests_every_example_once_per_run(separable_set):
    config = ExperimentConfig(
        example_set_path="x.arff",
        outer=SplitConfig(method="cv", folds=4),
        runs=2,
    )
    result = performance_estimation(separable_set, config)
    for run in result.runs:
        assert len(run.folds) == 4
        tested = sorted(i for fold in run.folds for i in fold.test_indices)
        assert tested == list(range(len(separable_set)))
        for fold in run.folds:
            assert not set(fold.train_indices) & set(fold.test_indices)
        assert run.report.matrix.total == len(separable_set)
        assert run.report.error == pytest.approx(np.mean([fold.report.error for fold in run.folds]))
        assert run.report.ber == pytest.approx(np.mean([fold.report.ber for fold in run.folds]))


def test_results_do_not_depend_on_worker_count(separable_set):
    base = dict(
        example_set_path="x.arff",
        algorithm="KMEANS",
        technique="ms",
        outer=SplitConfig(method="cv", folds=3),
        runs=3,
        grid_text="-C individual 2 4 -T individual 1.0 2.0",
    )
    serial = performance_estimation(separable_set, ExperimentConfig(**base, workers=1))
    parallel = performance_estimation(separable_set, ExperimentConfig(**base, workers=8))
    assert [run.model_dump() for run in serial.runs] == [run.model_dump() for run in parallel.runs]
    assert serial.best_params == parallel.best_params


def test_model_selection_records_inner_results(separable_set):
    config = ExperimentConfig(
        example_set_path="x.arff",
        technique="ms",
        grid=_knn_grid(threshold=[1.0, 1.5, 2.0]),
        inner=SplitConfig(method="cv", folds=3),
    )
    result = performance_estimation(separable_set, config)
    fold = result.runs[0].folds[0]
    assert len(fold.trials) == 3
    assert fold.inner_error == min(trial.error for trial in fold.trials)
    assert result.best_inner_error == fold.inner_error
    final = train_final_classifier(separable_set, result)
    assert final.hyperparameters()["threshold"] == result.best_params["threshold"]


def test_unrelabelled_sets_are_refused():
    with pytest.raises(RelabelError):
        performance_estimation(parse_arff(MINI_IRIS_ARFF), ExperimentConfig(example_set_path="iris.arff"))


@pytest.mark.parametrize("algorithm_id", sorted(ALGORITHMS))
def test_saved_classifiers_predict_identically(algorithm_id, separable_view, tmp_path):
    model = get_algorithm(algorithm_id).train(separable_view, {}, 2, NormKind.PER_ATTRIBUTE)
    path = save_model(model, tmp_path)
    assert path.name.startswith(f"{algorithm_id}_") and path.suffix == ".oscal"
    loaded = load_model(path)
    assert type(loaded) is type(model)
    assert loaded.hyperparameters() == model.hyperparameters()
    assert loaded.norm == model.norm
    queries = make_rng(21).normal(2.0, 3.0, size=(50, 2))
    assert loaded.predict_many(queries) == model.predict_many(queries)


def test_saving_twice_in_a_second_keeps_both_files(separable_view, tmp_path):
    model = KNN.train(separable_view, {}, 2, NormKind.NONE)
    first, second = save_model(model, tmp_path), save_model(model, tmp_path)
    assert first != second and first.exists() and second.exists()


def test_unknown_file_version_is_refused(separable_view):
    text = dumps_model(KNN.train(separable_view, {}, 2, NormKind.NONE), "now")
    with pytest.raises(ModelVersionError):
        loads_model(text.replace("OSCAL/1 ", "OSCAL/7 ", 1))


@pytest.mark.parametrize("mangle", [lambda t: t[: len(t) // 2], lambda t: "not a classifier\n{}", lambda t: t.replace("OSCAL/1 KNN", "OSCAL/1 NNPC", 1)])
def test_damaged_files_are_refused(separable_view, mangle):
    text = dumps_model(KNN.train(separable_view, {}, 2, NormKind.NONE), "now")
    with pytest.raises(ModelFormatError):
        loads_model(mangle(text))


def test_missing_classifier_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "absent.oscal")


def test_service_relabels_runs_and_writes_a_log(iris_path):
    config = ExperimentConfig(
        example_set_path=str(iris_path),
        relabel=True,
        target_label="Iris-setosa",
        algorithm="NNPC",
        technique="ms",
        grid_text="-D individual e m",
        outer=SplitConfig(percent=60),
        runs=2,
    )
    result = ExperimentService().run(config)
    log_path = Path(result.log_path)
    assert log_path.parent == Path(settings.LOG_DIR)
    assert log_path.name.startswith("NNPC_") and log_path.suffix == ".log"
    text = log_path.read_text(encoding="utf-8")
    for heading in (
        "NN-PC Classifier Options selected:-",
        "Experiment Options selected:-",
        "Target class: Iris-setosa",
        "Training and testing instances for each run:-",
        "Best parameters and error estimate for each run:-",
        "Classification matrices for each run:-",
        "Summary over runs:-",
        "Model Selection Results:",
    ):
        assert heading in text
    assert text.index("Training and testing") < text.index("Best parameters") < text.index("Classification matrices")


def test_evaluate_saved_classifier_on_a_new_set(iris_path, tmp_path):
    iris, _ = relabel(parse_arff(MINI_IRIS_ARFF), "Iris-setosa")
    model = get_algorithm("NNPC").train(IndexView.full(iris), {}, 2, NormKind.NONE)
    path = save_model(model, tmp_path)
    report = ExperimentService().evaluate_saved(str(path), str(iris_path), "Iris-setosa")
    assert report.matrix.total == 15
    assert report.matrix.tp == 5


def test_gaussian_sets_separate_well():
    config = ExperimentConfig(example_set_path="x.arff", runs=5)
    result = performance_estimation(gaussian_set(seed=1, shift=6.0), config)
    assert result.summary.error.mean < 0.15
    assert np.isfinite(result.summary.ber.std)
