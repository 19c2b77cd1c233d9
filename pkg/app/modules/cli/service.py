"""
The experimenter's command-line front end.

Every option resolves to an ExperimentConfig and the work is delegated to
the experiment module. Bad option values fall back to their defaults with
a notification; a bad path is asked for again.
"""

import logging
import sys
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Union

from app.core.config import settings
from app.shared.exceptions import (
    ArffParseError,
    ModelFormatError,
    OscailError,
    PromptExhaustedError,
    RelabelError,
)
from app.modules.arff.service import is_one_sided, read_arff_file, relabel
from app.modules.dataset.schemas import ExampleSet
from app.modules.experiment.grid import parse_param_grid, render_grid_echo, render_grid_help
from app.modules.experiment.logbook import (
    render_experiment_echo,
    render_report,
    render_selection_summary,
    render_trial,
)
from app.modules.experiment.registry import ALGORITHMS, AlgorithmSpec, get_algorithm
from app.modules.experiment.schemas import ExperimentConfig, ParamGrid, SplitConfig, SplitMethod, Technique, TrialResult
from app.modules.experiment.serialization import load_model, save_model
from app.modules.experiment.service import ExperimentService, evaluate_saved_model, train_final_classifier
from app.modules.metrics.schemas import EvalReport
from app.modules.preprocess.schemas import NormKind
from app.modules.cli.schemas import CliInvocation

logger = logging.getLogger(__name__)

BANNER = "\n".join([
    "-----",
    "--- OSCAIL - One Sided Classification and Inductive Learning ---",
    "-----",
    f"----- Experimentor Version {settings.VERSION} -----",
    "-----",
])

USAGE = "\n".join([
    "OSCAIL option usage details:",
    "",
    "-E <Path to the example set>",
    "    The example set to use in the experiment.",
    "-R <yes/no>",
    "    Relabel the example set after loading? (default: no).",
    "-N <yes/no>",
    "    Normalize the example set? (default: no).",
    "-A <algorithm name?>",
    "    Which algorithm to use?: (default:KNN)",
    "-T <technique choice?>",
    "    Enter pe for Performance Estimation or ms for Model Selection (default: pe).",
    "-S <ps/cv>",
    "    Enter ps for percentage split or cv for cross validation (default: ps).",
    "-r <Number of runs>",
    "    The amount of runs in the experiment (default: 1).",
    "-F <Number of folds>",
    "    The amount of folds in the experiment (for cross validation) (default: 3).",
    "-s <Initial random number seed>",
    "    The initial random number generator seed for shuffling (default: 2)",
    "-P <Percentage split percent>",
    "    The percent used for the percentage split of the example set (default: 50)",
    "-t <Training split used?>",
    "    Which way the training set with be split (percentage split or cross validation) (default: ps)",
    "-f <Training split folds?>",
    "    Amount of folds used for the split of the training examples (default: 3)",
    "-p <Training split percentage?>",
    "    Percentage used for the split of the training examples (default: 50)",
    "",
])

LOAD_PROMPT = "Would you like to load a previously saved classifier? (yes/no):"
SAVE_PROMPT = "Would you like to save this classifier?(yes/no):"
CLASSIFIER_PATH_PROMPT = "Please enter the path to the saved classifier:"
TEST_SET_PROMPT = "Please enter the path to the test set:"
EXAMPLE_SET_PROMPT = "Please enter the path to the example set:"
GRID_PROMPT = "\n".join([
    "Please type out a single string to set the options,",
    "as described above. Otherwise, the defaults will be chosen.",
    "(Press Enter with no text to skip this step.)",
])

YES = {"yes", "y"}
NO = {"no", "n"}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_IO = 2


class Prompter:
    """
    Reads prompt answers from a script (one answer per line) or stdin.

    A scripted prompter never falls back to stdin; running out of answers
    raises PromptExhaustedError.
    """

    def __init__(self, answers: Optional[Iterable[str]] = None, reader: Callable[[], str] = input):
        self._answers: Optional[List[str]] = list(answers) if answers is not None else None
        self._reader = reader

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "Prompter":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(answers=lines)

    def ask(self, question: str) -> str:
        print(question)
        if self._answers is not None:
            if not self._answers:
                raise PromptExhaustedError(f"no scripted answer left for: {question}")
            return self._answers.pop(0).strip()
        try:
            return self._reader().strip()
        except EOFError:
            raise PromptExhaustedError(f"input closed while asking: {question}") from None

    def ask_yes_no(self, question: str) -> bool:
        while True:
            answer = self.ask(question).lower()
            if answer in YES:
                return True
            if answer in NO:
                return False
            print("Please answer yes or no.")


def _yes_no(token: str) -> bool:
    value = token.lower()
    if value in YES:
        return True
    if value in NO:
        return False
    raise ValueError(f"'{token}' is not yes or no")


def _normalization(token: str) -> NormKind:
    value = token.lower()
    if value in YES:
        return NormKind(settings.DEFAULT_NORMALIZATION)
    if value in NO:
        return NormKind.NONE
    return NormKind(value)


def _algorithm(token: str) -> str:
    value = token.upper()
    if value not in ALGORITHMS:
        raise ValueError(f"'{token}' is not one of {', '.join(ALGORITHMS)}")
    return value


def _bounded_int(low: int) -> Callable[[str], int]:
    def convert(token: str) -> int:
        value = int(token)
        if value < low:
            raise ValueError(f"{value} is below {low}")
        return value
    return convert


def _percent(token: str) -> float:
    value = float(token)
    if not 0 < value < 100:
        raise ValueError(f"{value} is not strictly between 0 and 100")
    return value


# switch -> (field, converter); dotted fields belong to the outer or inner split
SWITCHES: Dict[str, tuple] = {
    "-E": ("example_set_path", str),
    "-R": ("relabel", _yes_no),
    "-N": ("normalization", _normalization),
    "-A": ("algorithm", _algorithm),
    "-T": ("technique", lambda token: Technique(token.lower())),
    "-S": ("outer.method", lambda token: SplitMethod(token.lower())),
    "-r": ("runs", _bounded_int(1)),
    "-F": ("outer.folds", _bounded_int(2)),
    "-s": ("seed", _bounded_int(0)),
    "-P": ("outer.percent", _percent),
    "-t": ("inner.method", lambda token: SplitMethod(token.lower())),
    "-f": ("inner.folds", _bounded_int(2)),
    "-p": ("inner.percent", _percent),
}


def parse_cli(args: Union[str, Sequence[str]]) -> CliInvocation:
    """
    Resolve the experimenter switches.

    With no arguments the usage block is due. Unknown switches, missing
    values and illegal values are reported in `notifications`; the option
    keeps its default.
    """
    tokens = args.split() if isinstance(args, str) else [str(token) for token in args]
    raw = " ".join(tokens)
    if not tokens:
        return CliInvocation(raw=raw, show_usage=True)

    values: Dict[str, object] = {}
    notifications: List[str] = []
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if token not in SWITCHES:
            notifications.append(f"Unknown argument '{token}' ignored")
            i += 1
            continue
        if i + 1 >= len(tokens) or tokens[i + 1] in SWITCHES:
            notifications.append(f"{token} has no value; using the default")
            i += 1
            continue
        field, convert = SWITCHES[token]
        try:
            values[field] = convert(tokens[i + 1])
        except ValueError as exc:
            notifications.append(f"{token} {tokens[i + 1]}: {exc}; using the default")
        i += 2

    outer = {name.split(".")[1]: value for name, value in values.items() if name.startswith("outer.")}
    inner = {name.split(".")[1]: value for name, value in values.items() if name.startswith("inner.")}
    flat = {name: value for name, value in values.items() if "." not in name}

    for message in notifications:
        logger.warning(message)
    return CliInvocation(
        raw=raw,
        outer=SplitConfig(**outer),
        inner=SplitConfig(**inner),
        notifications=notifications,
        **flat,
    )


def prompt_grid(algorithm: AlgorithmSpec, prompter: Prompter) -> ParamGrid:
    """Show the algorithm's switch help, read one option line and echo what was resolved."""
    print(render_grid_help(algorithm))
    print("")
    print(GRID_PROMPT)
    grid = parse_param_grid(prompter.ask(":"), algorithm)
    for message in grid.notifications:
        print(message)
    print("")
    print(render_grid_echo(grid, algorithm))
    print("")
    return grid


def _ask_path(prompter: Prompter, question: str, initial: Optional[str], load: Callable[[str], object]):
    """Load `initial` (or an answer to `question`), asking again while the path is bad."""
    path = initial or prompter.ask(question)
    while True:
        try:
            return path, load(path)
        except (OSError, UnicodeDecodeError, ArffParseError, ModelFormatError) as exc:
            print(f"Could not load {path}: {exc}")
            path = prompter.ask(question)


def _ask_target(example_set: ExampleSet, prompter: Prompter) -> tuple:
    classes = ", ".join(example_set.class_attribute.values)
    while True:
        target = prompter.ask(f"Please enter the class to use as the Target class ({classes}):")
        try:
            relabelled, _ = relabel(example_set, target)
            return target, relabelled
        except RelabelError as exc:
            print(str(exc))


def _one_sided(example_set: ExampleSet, prompter: Prompter, force: bool) -> tuple:
    if force or not is_one_sided(example_set):
        if not force:
            print("The example set classes are neither \"Target\" nor \"Other\"; it must be relabeled.")
        return _ask_target(example_set, prompter)
    return None, example_set


def saved_classifier_flow(
    path: Optional[str],
    test_set_path: Optional[str],
    prompter: Optional[Prompter] = None,
) -> EvalReport:
    """
    Load a saved classifier and score it on a test set.

    Bad paths are asked for again; an arity mismatch between model and
    test set is raised.
    """
    prompter = prompter or Prompter()
    _, model = _ask_path(prompter, CLASSIFIER_PATH_PROMPT, path, load_model)
    _, test_set = _ask_path(prompter, TEST_SET_PROMPT, test_set_path, read_arff_file)
    _, test_set = _one_sided(test_set, prompter, force=False)

    report = evaluate_saved_model(model, test_set)
    print(f"{model.algorithm} classifier on {len(test_set)} test examples:")
    print(render_report(report))
    return report


def _print_trial(algorithm: AlgorithmSpec) -> Callable[[TrialResult], None]:
    def on_trial(trial: TrialResult) -> None:
        print("")
        print(render_trial(trial, algorithm))
        print("-----")
    return on_trial


def run_experiment(
    invocation: CliInvocation,
    prompter: Prompter,
    service: Optional[ExperimentService] = None,
) -> ExperimentConfig:
    service = service or ExperimentService()
    path, example_set = _ask_path(prompter, EXAMPLE_SET_PROMPT, invocation.example_set_path, read_arff_file)
    target, example_set = _one_sided(example_set, prompter, force=invocation.relabel)

    algorithm = get_algorithm(invocation.algorithm)
    grid = prompt_grid(algorithm, prompter)
    config = invocation.to_config(example_set_path=path, target_label=target, grid=grid)
    print(render_experiment_echo(config))
    print("")

    result = service.run_loaded(example_set, config, _print_trial(algorithm))

    for run in result.runs:
        print(f"Run {run.run + 1} (seed {run.seed})")
        print(render_report(run.report))
        print("")
    print(
        f"Mean error over {result.summary.count} run(s): {result.summary.error.mean!r} "
        f"(sd {result.summary.error.std!r}); mean BER: {result.summary.ber.mean!r}"
    )
    print(f"Log written to {result.log_path}")

    if config.technique == Technique.MODEL_SELECTION:
        print("")
        print(render_selection_summary(result.best_params, result.best_inner_error, algorithm))
        print("")
        if prompter.ask_yes_no(SAVE_PROMPT):
            model = train_final_classifier(example_set, result)
            print(f"Classifier saved to {save_model(model, settings.MODEL_DIR)}")
    return config


def run_cli(argv: Sequence[str], prompter: Optional[Prompter] = None) -> int:
    """Run the experimenter; returns the process exit status."""
    if prompter is None:
        prompter = Prompter.from_file(settings.PROMPT_ANSWERS_FILE) if settings.PROMPT_ANSWERS_FILE else Prompter()
    invocation = parse_cli(argv)
    try:
        if invocation.show_usage:
            print(BANNER)
            print(USAGE)
            if prompter.ask_yes_no(LOAD_PROMPT):
                saved_classifier_flow(None, None, prompter)
            return EXIT_OK

        print(BANNER)
        for message in invocation.notifications:
            print(message)
        run_experiment(invocation, prompter)
        return EXIT_OK
    except (PromptExhaustedError, OSError) as exc:
        logger.error(f"Experimenter stopped: {exc}")
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OscailError as exc:
        logger.error(f"Experiment failed: {exc}")
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_FAILED
