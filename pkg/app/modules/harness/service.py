"""
Unexpected-outlier trend studies.

Each run splits the primary set once; every learner trains on the same
training view and is scored on the test view grown by 0, 25, 50, ...
secondary examples. The secondary rows are shuffled once per study, so
each increment's injected set contains the previous one.
"""

import csv
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import settings
from app.shared.classifier import Classifier
from app.shared.exceptions import RelabelError, StudyConfigError
from app.shared.utils import map_ordered
from app.modules.arff.service import is_one_sided, read_arff_file
from app.modules.dataset.schemas import ExampleSet, IndexView, OTHER
from app.modules.dataset.service import concat_example_sets, make_rng, shuffle, stratified_percentage_split
from app.modules.experiment.registry import get_algorithm
from app.modules.harness.schemas import (
    RosterEntry,
    StudyManifest,
    TrendRow,
    TrendStudyConfig,
    TrendTable,
)
from app.modules.metrics.schemas import DistanceMetric, EvalReport
from app.modules.metrics.service import confusion_matrix, evaluate_matrix, summarize
from app.modules.neighbors.models import BinaryKnnModel
from app.modules.neighbors.service import predict_binary_knn, train_binary_knn
from app.modules.preprocess.schemas import NormKind

logger = logging.getLogger(__name__)

DIGIT_ROSTER = [
    RosterEntry(algorithm="KNN", params={"m": 3, "k": 3, "threshold": 1.5, "metric": "e"}),
    RosterEntry(algorithm="KMEANS", params={"clusters": 10, "threshold": 2000.0, "metric": "e"}),
    RosterEntry(algorithm="BKNN", params={"k": 1, "metric": "e"}),
]

SOLVENT_ROSTER = [
    RosterEntry(algorithm="KNN", params={"m": 3, "k": 3, "threshold": 1.5, "metric": "e"}),
    RosterEntry(algorithm="NNPC", params={"metric": "e"}),
    RosterEntry(algorithm="KMEANS", params={"clusters": 5, "threshold": 4.5, "metric": "e"}),
    RosterEntry(algorithm="SVM", params={"width": 3.0, "nu": 0.1, "kernel": "g"}),
    RosterEntry(algorithm="BKNN", params={"k": 1, "metric": "e"}),
]


@dataclass(frozen=True)
class OutlierPool:
    """Secondary rows of a combined parent set, in injection order."""
    parent: ExampleSet
    order: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)


def build_outlier_pool(parent: ExampleSet, secondary_rows: Sequence[int], seed: int) -> OutlierPool:
    """Shuffle the secondary rows once with `seed`."""
    rows = np.asarray(list(secondary_rows), dtype=int)
    order = rows[make_rng(seed).permutation(len(rows))] if len(rows) else rows
    return OutlierPool(parent=parent, order=tuple(int(i) for i in order))


def inject_outliers(test: IndexView, pool: OutlierPool, count: int) -> IndexView:
    """The test view followed by the first `count` pooled outliers."""
    if test.parent is not pool.parent:
        raise StudyConfigError("the test view and the outlier pool must share one parent set")
    if count < 0 or count > len(pool):
        raise StudyConfigError(f"cannot inject {count} outliers from a pool of {len(pool)}")
    return test.with_indices(test.indices + pool.order[:count])


def train_baseline_binary_knn(
    train: IndexView,
    k: int = 1,
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN,
    norm: NormKind = NormKind.NONE,
) -> BinaryKnnModel:
    """Two-class kNN baseline, a linear scan over every stored Target and Other example."""
    return train_binary_knn(train, k, DistanceMetric(metric), NormKind(norm))


def predict_baseline_binary_knn(model: BinaryKnnModel, x: Sequence[float]) -> str:
    return predict_binary_knn(model, x)


def _train_entry(entry: RosterEntry, train: IndexView, seed: int, norm: NormKind) -> Classifier:
    spec = get_algorithm(entry.algorithm)
    if spec.model_class is BinaryKnnModel:
        params = {**spec.defaults(), **entry.params}
        return train_baseline_binary_knn(train, params["k"], params["metric"], norm)
    return spec.train(train, entry.params, seed, norm)


def _predict_rows(model: Classifier, rows: np.ndarray) -> List[str]:
    if isinstance(model, BinaryKnnModel):
        return [predict_baseline_binary_knn(model, x) for x in rows]
    return model.predict_many(rows)


def load_study_sets(config: TrendStudyConfig) -> Tuple[ExampleSet, ExampleSet]:
    return read_arff_file(config.primary_path), read_arff_file(config.secondary_path)


def _check_inputs(config: TrendStudyConfig, primary: ExampleSet, secondary: ExampleSet) -> None:
    if not is_one_sided(primary):
        raise RelabelError("the primary set must only hold Target and Other examples")
    if any(label != OTHER for label in secondary.labels):
        raise StudyConfigError("every secondary (unexpected outlier) example must be labelled Other")
    if config.increments[-1] > len(secondary):
        raise StudyConfigError(
            f"largest increment {config.increments[-1]} exceeds the {len(secondary)} secondary examples"
        )
    for entry in config.roster:
        get_algorithm(entry.algorithm)


def _run_reports(
    config: TrendStudyConfig,
    primary_view: IndexView,
    pool: OutlierPool,
    run: int,
) -> Dict[str, List[EvalReport]]:
    """One run: reports per roster entry, one per increment."""
    seed = config.seed + run
    split = stratified_percentage_split(shuffle(primary_view, seed), config.train_percent, seed)
    injected = inject_outliers(split.test, pool, config.increments[-1])
    truths = injected.labels()
    n_test = len(split.test)

    reports: Dict[str, List[EvalReport]] = {}
    for entry in config.roster:
        model = _train_entry(entry, split.train, seed, config.normalization)
        # the model is fixed within a run, so one pass covers every increment
        predictions = _predict_rows(model, injected.features())
        reports[entry.name] = [
            evaluate_matrix(confusion_matrix(predictions[:n_test + count], truths[:n_test + count]))
            for count in config.increments
        ]
    logger.debug(f"Trend study run {run + 1} (seed {seed}) done")
    return reports


def run_trend_study(
    config: TrendStudyConfig,
    primary: Optional[ExampleSet] = None,
    secondary: Optional[ExampleSet] = None,
) -> TrendTable:
    if primary is None or secondary is None:
        primary, secondary = load_study_sets(config)
    _check_inputs(config, primary, secondary)

    parent, secondary_rows = concat_example_sets(primary, secondary)
    primary_view = IndexView(parent, tuple(range(len(primary))))
    pool = build_outlier_pool(parent, secondary_rows, config.seed)
    logger.info(
        f"Trend study: {config.runs} run(s), {len(config.roster)} algorithm(s), "
        f"increments {config.increments}"
    )

    per_run = map_ordered(
        lambda run: _run_reports(config, primary_view, pool, run),
        list(range(config.runs)),
        config.workers or settings.MAX_WORKERS,
    )

    rows: Dict[str, List[TrendRow]] = {}
    for entry in config.roster:
        rows[entry.name] = []
        for position, increment in enumerate(config.increments):
            reports = [run_reports[entry.name][position] for run_reports in per_run]
            summary = summarize(reports)
            rows[entry.name].append(
                TrendRow(
                    increment=increment,
                    error_mean=100.0 * summary.error.mean,
                    error_std=100.0 * summary.error.std,
                    ber_mean=100.0 * summary.ber.mean,
                    ber_std=100.0 * summary.ber.std,
                    degenerate_runs=sum(report.degenerate for report in reports),
                )
            )
        first, last = rows[entry.name][0], rows[entry.name][-1]
        logger.info(
            f"{entry.name}: error {first.error_mean:.2f}% at {first.increment} -> "
            f"{last.error_mean:.2f}% at {last.increment}"
        )

    return TrendTable(
        algorithms=[entry.name for entry in config.roster],
        increments=list(config.increments),
        rows=rows,
        runs=config.runs,
        seeds=[config.seed + run for run in range(config.runs)],
        outlier_order=[index - secondary_rows.start for index in pool.order],
    )


METRICS = ("error", "ber")


def emit_trend_csv(table: TrendTable, stem: Union[str, Path]) -> List[Path]:
    """
    Write `<stem>_error.csv` and `<stem>_ber.csv`.

    Header: increment,<algo1>,<algo1>_sd,<algo2>,<algo2>_sd,...
    """
    if not table.algorithms:
        raise StudyConfigError("a trend table without algorithms cannot be exported")
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)

    paths = []
    for metric in METRICS:
        path = stem.parent / f"{stem.name}_{metric}.csv"
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            header = ["increment"]
            for name in table.algorithms:
                header += [name, f"{name}_sd"]
            writer.writerow(header)
            for position, increment in enumerate(table.increments):
                line = [str(increment)]
                for name in table.algorithms:
                    row = table.rows[name][position]
                    line += [
                        f"{getattr(row, f'{metric}_mean'):.6f}",
                        f"{getattr(row, f'{metric}_std'):.6f}",
                    ]
                writer.writerow(line)
        paths.append(path)
        logger.info(f"Wrote {path}")
    return paths


def read_trend_csv(path: Union[str, Path]) -> Dict[str, List[float]]:
    """Columns of an exported CSV by header name (increment included)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        columns: Dict[str, List[float]] = {name: [] for name in reader.fieldnames or []}
        for record in reader:
            for name, value in record.items():
                columns[name].append(float(value))
    return columns


def write_manifest(
    config: TrendStudyConfig,
    table: TrendTable,
    path: Union[str, Path],
    outputs: Sequence[Union[str, Path]] = (),
) -> Path:
    manifest = StudyManifest(
        config=config,
        seeds=table.seeds,
        outlier_order=table.outlier_order,
        outputs=[str(output) for output in outputs],
        created=datetime.now(timezone.utc).isoformat(),
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Wrote study manifest {path}")
    return path


def render_trend_table(table: TrendTable, metric: str = "error") -> str:
    """Console table of mean (sd) percentages per increment."""
    width = 18
    lines = [f"{'Outliers':<10}" + "".join(f"{name:>{width}}" for name in table.algorithms)]
    for position, increment in enumerate(table.increments):
        cells = []
        for name in table.algorithms:
            row = table.rows[name][position]
            cells.append(f"{getattr(row, f'{metric}_mean'):.2f} ({getattr(row, f'{metric}_std'):.2f})")
        lines.append(f"{increment:<10}" + "".join(f"{cell:>{width}}" for cell in cells))
    return "\n".join(lines)


class TrendStudyService:
    """Runs a study and writes its CSV exports and manifest."""

    def run(self, config: TrendStudyConfig, output_dir: Union[str, Path], stem: str = "trend") -> TrendTable:
        primary, secondary = load_study_sets(config)
        table = run_trend_study(config, primary, secondary)
        outputs = emit_trend_csv(table, Path(output_dir) / stem)
        write_manifest(config, table, Path(output_dir) / f"{stem}_manifest.json", outputs)
        return table
