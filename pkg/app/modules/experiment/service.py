"""
Model selection, performance estimation and experiment orchestration.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.shared.classifier import Classifier
from app.shared.exceptions import EvaluationError, OscailError, RelabelError, TrainingError
from app.shared.utils import map_ordered
from app.modules.arff.service import is_one_sided, read_arff_file, relabel
from app.modules.dataset.schemas import ExampleSet, IndexView, SplitPlan
from app.modules.dataset.service import cv_splits, shuffle, stratified_percentage_split
from app.modules.experiment.grid import parse_param_grid
from app.modules.experiment.logbook import default_log_path, write_log
from app.modules.experiment.registry import AlgorithmSpec, get_algorithm
from app.modules.experiment.serialization import load_model
from app.modules.experiment.schemas import (
    ExperimentConfig,
    ExperimentResult,
    FoldResult,
    ParamGrid,
    RunResult,
    SelectionResult,
    SplitConfig,
    SplitMethod,
    Technique,
    TrialResult,
)
from app.modules.metrics.schemas import ConfusionMatrix, EvalReport
from app.modules.metrics.service import average_reports, confusion_matrix, evaluate_matrix, summarize
from app.modules.preprocess.schemas import NormKind

logger = logging.getLogger(__name__)

TrialCallback = Callable[[TrialResult], None]


def make_splits(view: IndexView, split: SplitConfig, seed: int) -> List[SplitPlan]:
    if split.method == SplitMethod.CROSS_VALIDATION:
        return cv_splits(view, split.folds, seed)
    return [stratified_percentage_split(view, split.percent, seed)]


def score(model: Classifier, test: IndexView) -> ConfusionMatrix:
    return confusion_matrix(model.predict_many(test.features()), test.labels())


def resolve_grid(config: ExperimentConfig) -> ParamGrid:
    if config.grid is not None:
        return config.grid
    return parse_param_grid(config.grid_text, config.algorithm)


def model_selection(
    train: IndexView,
    algorithm: AlgorithmSpec,
    grid: ParamGrid,
    inner: SplitConfig,
    seed: int,
    norm: NormKind = NormKind.NONE,
    workers: Optional[int] = None,
    on_trial: Optional[TrialCallback] = None,
) -> SelectionResult:
    """
    Score every grid combination on inner splits of `train` and keep the one
    with the smallest mean inner error; the first combination wins ties.

    Only indices of `train` are ever used, so outer test rows stay untouched.
    """
    combinations = grid.combinations()
    if not combinations:
        raise EvaluationError("the parameter grid has no combinations")
    splits = make_splits(train, inner, seed)

    def run_trial(params: Dict[str, Any]) -> TrialResult:
        matrix = ConfusionMatrix()
        errors = []
        try:
            for split in splits:
                counts = score(algorithm.train(split.train, params, seed, norm), split.test)
                matrix = matrix + counts
                errors.append(evaluate_matrix(counts).error)
        except OscailError as exc:
            logger.warning(f"Combination {params} could not be evaluated: {exc}")
            return TrialResult(params=params, failed=str(exc))
        return TrialResult(params=params, error=sum(errors) / len(errors), matrix=matrix)

    trials = map_ordered(run_trial, combinations, workers or settings.MAX_WORKERS)
    best: Optional[TrialResult] = None
    for trial in trials:
        if on_trial is not None:
            on_trial(trial)
        if trial.error is not None and (best is None or trial.error < best.error):
            best = trial
    if best is None:
        raise TrainingError("no parameter combination could be trained on the inner splits")
    return SelectionResult(best_params=best.params, best_error=best.error, trials=trials)


def _run_once(
    view: IndexView,
    config: ExperimentConfig,
    algorithm: AlgorithmSpec,
    grid: ParamGrid,
    run: int,
    on_trial: Optional[TrialCallback],
    inner_workers: int = 1,
) -> RunResult:
    seed = config.seed + run
    splits = make_splits(shuffle(view, seed), config.outer, seed)
    first = grid.combinations()[0]

    folds: List[FoldResult] = []
    for fold, split in enumerate(splits):
        selection = None
        params = first
        if config.technique == Technique.MODEL_SELECTION:
            selection = model_selection(
                split.train, algorithm, grid, config.inner, seed,
                config.normalization, inner_workers, on_trial,
            )
            params = selection.best_params
        model = algorithm.train(split.train, params, seed, config.normalization)
        folds.append(
            FoldResult(
                fold=fold,
                train_indices=list(split.train.indices),
                test_indices=list(split.test.indices),
                params=params,
                inner_error=selection.best_error if selection else None,
                trials=selection.trials if selection else [],
                report=evaluate_matrix(score(model, split.test)),
            )
        )

    # rates are averaged over the folds; the matrix holds the summed counts
    report = average_reports([fold.report for fold in folds])
    logger.info(f"Run {run + 1} (seed {seed}) finished: error {report.error}")
    return RunResult(
        run=run,
        seed=seed,
        folds=folds,
        report=report,
        fold_summary=summarize([fold.report for fold in folds]),
    )


def performance_estimation(
    example_set: ExampleSet,
    config: ExperimentConfig,
    on_trial: Optional[TrialCallback] = None,
) -> ExperimentResult:
    """
    Run `config.runs` runs with seeds seed, seed + 1, ...; each run shuffles,
    splits (ps or cv), optionally selects parameters on the training side,
    trains and evaluates on the test side.
    """
    if not is_one_sided(example_set):
        raise RelabelError("the example set must only hold Target and Other examples; relabel it first")
    algorithm = get_algorithm(config.algorithm)
    grid = resolve_grid(config)
    if config.technique == Technique.PERFORMANCE_ESTIMATION and grid.size > 1:
        logger.warning("Performance estimation uses the first value of every option; run ms to search the grid")

    view = IndexView.full(example_set)
    logger.info(
        f"Starting {config.technique.full_name} with {algorithm.id}: {config.runs} run(s), "
        f"base seed {config.seed}"
    )
    workers = config.workers or settings.MAX_WORKERS
    # a single run spends the workers on grid points instead
    parallel_runs = workers > 1 and config.runs > 1
    runs = map_ordered(
        lambda run: _run_once(
            view, config, algorithm, grid, run,
            None if parallel_runs else on_trial,
            1 if parallel_runs else workers,
        ),
        list(range(config.runs)),
        workers,
    )
    if on_trial is not None and parallel_runs:
        for run in runs:
            for fold in run.folds:
                for trial in fold.trials:
                    on_trial(trial)

    best_params, best_error = best_selected(runs)
    return ExperimentResult(
        config=config,
        grid=grid,
        runs=runs,
        summary=summarize([run.report for run in runs]),
        best_params=best_params,
        best_inner_error=best_error,
    )


def best_selected(runs: Sequence[RunResult]) -> Tuple[Optional[Dict[str, Any]], Optional[float]]:
    """Parameters with the smallest inner error over all runs and folds; first wins ties."""
    best: Tuple[Optional[Dict[str, Any]], Optional[float]] = (None, None)
    for run in runs:
        for fold in run.folds:
            if fold.inner_error is not None and (best[1] is None or fold.inner_error < best[1]):
                best = (fold.params, fold.inner_error)
    return best


def train_final_classifier(example_set: ExampleSet, result: ExperimentResult) -> Classifier:
    """Retrain on the whole example set with the best selected (or first) parameters."""
    config = result.config
    params = result.best_params or result.grid.combinations()[0]
    algorithm = get_algorithm(config.algorithm)
    logger.info(f"Training final {algorithm.id} classifier on all {len(example_set)} examples with {params}")
    return algorithm.train(IndexView.full(example_set), params, config.seed, config.normalization)


def prepare_example_set(path: str, target_label: Optional[str] = None) -> ExampleSet:
    """Read an ARFF file and relabel it when a target class is given."""
    example_set = read_arff_file(path)
    if target_label:
        example_set, _ = relabel(example_set, target_label)
    return example_set


def evaluate_saved_model(model: Classifier, example_set: ExampleSet) -> EvalReport:
    """Classify a one-sided test set with a loaded classifier."""
    if not is_one_sided(example_set):
        raise RelabelError("the test set must only hold Target and Other examples; relabel it first")
    view = IndexView.full(example_set)
    return evaluate_matrix(score(model, view))


class ExperimentService:
    """Runs whole experiments from a config: load, relabel, estimate, log."""

    def run(self, config: ExperimentConfig, on_trial: Optional[TrialCallback] = None) -> ExperimentResult:
        example_set = prepare_example_set(
            config.example_set_path, config.target_label if config.relabel else None
        )
        return self.run_loaded(example_set, config, on_trial)

    def run_loaded(
        self,
        example_set: ExampleSet,
        config: ExperimentConfig,
        on_trial: Optional[TrialCallback] = None,
    ) -> ExperimentResult:
        """Estimate on an example set that is already loaded (and relabelled) and write the log."""
        result = performance_estimation(example_set, config, on_trial)
        log_path = write_log(config, result, default_log_path(config, Path(settings.LOG_DIR)))
        return result.model_copy(update={"log_path": str(log_path)})

    def evaluate_saved(self, model_path: str, test_set_path: str, target_label: Optional[str] = None) -> EvalReport:
        model = load_model(model_path)
        return evaluate_saved_model(model, prepare_example_set(test_set_path, target_label))
