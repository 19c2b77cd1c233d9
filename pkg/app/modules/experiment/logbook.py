"""
Experiment log files and the console blocks they share with the CLI.

A log holds, in order: the option echo blocks, the training and testing
indices of every run, the chosen parameters and error per run, and the
confusion matrices per run.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List

from app.shared.utils import format_percentage, unique_path, utc_timestamp
from app.modules.experiment.grid import format_value, render_grid_echo
from app.modules.experiment.registry import AlgorithmSpec, get_algorithm
from app.modules.experiment.schemas import (
    ExperimentConfig,
    ExperimentResult,
    SplitMethod,
    Technique,
    TrialResult,
)
from app.modules.metrics.schemas import EvalReport
from app.modules.metrics.service import RATE_NAMES, render_confusion_matrix
from app.modules.preprocess.schemas import NormKind

logger = logging.getLogger(__name__)

ECHO_WIDTH = 27


def _echo_line(switch: str, description: str, value: Any) -> str:
    return f"{f'-{switch} ({description})':<{ECHO_WIDTH}}---> {value}"


def render_experiment_echo(config: ExperimentConfig) -> str:
    """The "Experiment Options selected:-" block."""
    outer_folds = config.outer.folds if config.outer.method == SplitMethod.CROSS_VALIDATION else 0
    inner_folds = config.inner.folds if config.inner.method == SplitMethod.CROSS_VALIDATION else 0
    lines = [
        "Experiment Options selected:-",
        "",
        _echo_line("E", "Example set path", config.example_set_path),
        _echo_line("R", "Relabeled?", str(config.relabel).lower()),
        _echo_line("N", "Normalized?", str(config.normalization != NormKind.NONE).lower()),
        _echo_line("A", "Algorithm to use?", config.algorithm),
        _echo_line("T", "Technique to use?", config.technique.full_name),
        _echo_line("S", "Example set split?", config.outer.method.full_name),
        _echo_line("r", "Number of runs?", config.runs),
        _echo_line("F", "Number of folds?", outer_folds),
        _echo_line("s", "Random number seed?", config.seed),
        _echo_line("P", "Percentage for split?", float(config.outer.percent)),
        _echo_line("t", "Training set split?", config.inner.method.full_name),
        _echo_line("f", "Training split folds?", inner_folds),
        _echo_line("p", "Training split %?", float(config.inner.percent)),
    ]
    if config.relabel:
        lines.append(f"Target class: {config.target_label}")
    if config.normalization != NormKind.NONE:
        lines.append(f"Normalization: {config.normalization.value}")
    return "\n".join(lines)


def render_params(params: Dict[str, Any], algorithm: AlgorithmSpec) -> str:
    """e.g. "M: 4 K: 4 Threshold: 4.0 Dist metric: c"."""
    parts = []
    for spec in algorithm.switches:
        if spec.name in params:
            parts.append(f"{spec.label}: {format_value(params[spec.name])}")
    return " ".join(parts)


def render_trial(trial: TrialResult, algorithm: AlgorithmSpec) -> str:
    """One model-selection combination: matrix, parameters and error estimate."""
    params = render_params(trial.params, algorithm)
    if trial.error is None:
        return f"{params} could not be evaluated: {trial.failed}"
    return f"{render_confusion_matrix(trial.matrix)}\n\n{params} Error estimate: {trial.error!r}"


def render_selection_summary(params: Dict[str, Any], error: float, algorithm: AlgorithmSpec) -> str:
    lines = ["Model Selection Results:", "-----", f"Smallest Error Estimate -> {error!r}"]
    for spec in algorithm.switches:
        if spec.name in params:
            lines.append(f"Best {spec.best_label} -----> {format_value(params[spec.name])}")
    lines.append("-----")
    return "\n".join(lines)


def render_report(report: EvalReport) -> str:
    lines = [render_confusion_matrix(report.matrix), ""]
    lines.append(f"Error estimate: {report.error!r}")
    lines.append(f"Sensitivity: {report.sensitivity!r}")
    lines.append(f"Specificity: {report.specificity!r}")
    lines.append(f"BAR: {report.bar!r}")
    lines.append(f"BER: {report.ber!r}")
    if report.degenerate:
        lines.append("(a test slice held no Target or no Other examples; that rate was set to 1)")
    return "\n".join(lines)


def render_log(config: ExperimentConfig, result: ExperimentResult) -> str:
    algorithm = get_algorithm(config.algorithm)
    sections: List[str] = [
        "OSCAIL Experiment Log",
        "",
        render_grid_echo(result.grid, algorithm),
        "",
        render_experiment_echo(config),
        "",
    ]
    if result.grid.notifications:
        sections.append("Option notifications:-")
        sections.extend(result.grid.notifications)
        sections.append("")

    sections.append("Training and testing instances for each run:-")
    for run in result.runs:
        sections.append(f"Run {run.run + 1} (seed {run.seed})")
        for fold in run.folds:
            sections.append(f"  Fold {fold.fold + 1} training: {fold.train_indices}")
            sections.append(f"  Fold {fold.fold + 1} testing: {fold.test_indices}")
    sections.append("")

    sections.append("Best parameters and error estimate for each run:-")
    for run in result.runs:
        for fold in run.folds:
            line = f"Run {run.run + 1} Fold {fold.fold + 1}: {render_params(fold.params, algorithm)}"
            if fold.inner_error is not None:
                line += f" Inner error estimate: {fold.inner_error!r}"
            sections.append(f"{line} Error estimate: {fold.report.error!r}")
    sections.append("")

    sections.append("Classification matrices for each run:-")
    for run in result.runs:
        for fold in run.folds:
            sections.append(f"Run {run.run + 1} Fold {fold.fold + 1}")
            for trial in fold.trials:
                sections.append(render_trial(trial, algorithm))
                sections.append("")
            sections.append(render_report(fold.report))
            sections.append("")
        if len(run.folds) > 1:
            sections.append(f"Run {run.run + 1} averaged over folds")
            sections.append(render_report(run.report))
            sections.append("")

    sections.append("Summary over runs:-")
    for name in RATE_NAMES:
        stats = getattr(result.summary, name)
        sections.append(f"{name}: mean {format_percentage(stats.mean, 4)} sd {format_percentage(stats.std, 4)}")
    if config.technique == Technique.MODEL_SELECTION and result.best_params is not None:
        sections.append("")
        sections.append(render_selection_summary(result.best_params, result.best_inner_error, algorithm))
    return "\n".join(sections) + "\n"


def default_log_path(config: ExperimentConfig, directory: Path) -> Path:
    return unique_path(directory, f"{config.algorithm.upper()}_{utc_timestamp()}", ".log")


def write_log(config: ExperimentConfig, result: ExperimentResult, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_log(config, result), encoding="utf-8")
    logger.info(f"Experiment log written to {path}")
    return path
