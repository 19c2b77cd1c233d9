"""
Algorithm registry: every learner with its grid switches, defaults and trainer.
"""

from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Optional, Tuple, Type

from app.shared.classifier import Classifier
from app.shared.exceptions import TrainingError
from app.modules.dataset.schemas import IndexView
from app.modules.kmeans.models import KMeansModel
from app.modules.kmeans.service import train_kmeans
from app.modules.metrics.schemas import DistanceMetric
from app.modules.neighbors.models import BinaryKnnModel, NnPcModel, OsKnnModel
from app.modules.neighbors.service import train_binary_knn, train_nnpc, train_osknn
from app.modules.ocsvm.models import McOcSvmModel, OcSvmModel
from app.modules.ocsvm.schemas import KernelKind, KernelSpec
from app.modules.ocsvm.service import train_mc_ocsvm, train_ocsvm
from app.modules.preprocess.schemas import NormKind


class ValueKind:
    INT = "int"
    FLOAT = "float"
    METRIC = "metric"
    KERNEL = "kernel"


@dataclass(frozen=True)
class SwitchSpec:
    """One classifier option settable from the grid string."""
    switch: str                 # letter after the dash
    name: str                   # hyperparameter name passed to the trainer
    description: str            # short text in the option echo
    help: str                   # long text in the option help
    kind: str
    default: Any
    valid: Callable[[Any], bool]
    label: str                  # "M: 4 Threshold: 4.0 ..." result lines
    best_label: str             # "Best threshold -----> 4.0" lines

    @property
    def allows_sequence(self) -> bool:
        return self.kind in (ValueKind.INT, ValueKind.FLOAT)

    def convert(self, token: str) -> Any:
        """Parse one token; raises ValueError when it is not a legal value."""
        if self.kind == ValueKind.INT:
            value = int(token)
        elif self.kind == ValueKind.FLOAT:
            value = float(token)
        elif self.kind == ValueKind.METRIC:
            value = DistanceMetric(token).value
        else:
            value = KernelKind(token).value
        if not self.valid(value):
            raise ValueError(f"{token} is out of range for -{self.switch}")
        return value


TrainerFn = Callable[[IndexView, Dict[str, Any], int, NormKind], Classifier]


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    title: str
    switches: Tuple[SwitchSpec, ...]
    trainer: TrainerFn
    model_class: Type[Classifier]
    example_usage: str
    one_sided: bool = True

    def switch(self, letter: str) -> Optional[SwitchSpec]:
        for spec in self.switches:
            if spec.switch == letter:
                return spec
        return None

    def defaults(self) -> Dict[str, Any]:
        return {spec.name: spec.default for spec in self.switches}

    def train(self, view: IndexView, params: Dict[str, Any], seed: int, norm: NormKind) -> Classifier:
        merged = {**self.defaults(), **params}
        return self.trainer(view, merged, seed, norm)


def _positive(value) -> bool:
    return value > 0


def _at_least_one(value) -> bool:
    return value >= 1


def _nu_range(value) -> bool:
    return 0 < value <= 1


def _any(value) -> bool:
    return True


M_SWITCH = SwitchSpec(
    "M", "m", "M neighbours used",
    "The amount of nearest neighbours to the test example",
    ValueKind.INT, 3, _at_least_one, "M", "m",
)
K_SWITCH = SwitchSpec(
    "K", "k", "K neighbours of M",
    "The amount of nearest neighbours to each of the M neighbours",
    ValueKind.INT, 3, _at_least_one, "K", "k",
)
T_SWITCH = SwitchSpec(
    "T", "threshold", "Threshold used",
    "The threshold a test example is compared against",
    ValueKind.FLOAT, 1.5, _positive, "Threshold", "threshold",
)
D_SWITCH = SwitchSpec(
    "D", "metric", "Distance metric used",
    "The distance metric to use (Euclidean=e, Manhattan=m, Cosine=c)",
    ValueKind.METRIC, DistanceMetric.EUCLIDEAN.value, _any, "Dist metric", "distance metric",
)
C_SWITCH = SwitchSpec(
    "C", "clusters", "Clusters used",
    "The amount of clusters the targets are grouped into",
    ValueKind.INT, 10, _at_least_one, "Clusters", "clusters",
)
S_SWITCH = SwitchSpec(
    "S", "width", "Kernel width used",
    "The width (sigma) of the gaussian kernel",
    ValueKind.FLOAT, 1.0, _positive, "Width", "kernel width",
)
N_SWITCH = SwitchSpec(
    "N", "nu", "Nu used",
    "The regularisation parameter nu, between 0 and 1",
    ValueKind.FLOAT, 0.01, _nu_range, "Nu", "nu",
)
KERNEL_SWITCH = SwitchSpec(
    "k", "kernel", "Kernel used",
    "The kernel to use (Gaussian=g, Polynomial=p)",
    ValueKind.KERNEL, KernelKind.GAUSSIAN.value, _any, "Kernel", "kernel",
)
E_SWITCH = SwitchSpec(
    "e", "exponent", "Polynomial exponent used",
    "The exponent of the polynomial kernel (at least 1)",
    ValueKind.FLOAT, 1.0, _at_least_one, "Exponent", "exponent",
)


def _kernel(params: Dict[str, Any]) -> KernelSpec:
    return KernelSpec(kind=params["kernel"], width=params["width"], exponent=params["exponent"])


def _train_knn(view, params, seed, norm):
    return train_osknn(view, params["m"], params["k"], params["threshold"], params["metric"], norm)


def _train_nnpc(view, params, seed, norm):
    return train_nnpc(view, params["metric"], norm)


def _train_kmeans(view, params, seed, norm):
    return train_kmeans(view, params["clusters"], seed, params["threshold"], params["metric"], norm)


def _train_svm(view, params, seed, norm):
    return train_ocsvm(view, params["nu"], _kernel(params), norm)


def _train_mcsvm(view, params, seed, norm):
    return train_mc_ocsvm(view, params["clusters"], params["nu"], _kernel(params), seed, norm)


def _train_bknn(view, params, seed, norm):
    return train_binary_knn(view, params["k"], params["metric"], norm)


ALGORITHMS: Dict[str, AlgorithmSpec] = {
    spec.id: spec
    for spec in (
        AlgorithmSpec(
            "KNN", "KNN Classifier", (M_SWITCH, K_SWITCH, T_SWITCH, D_SWITCH),
            _train_knn, OsKnnModel,
            "-M individual 1 2 -K individual 3 2 -T individual 9.0 7.0 -D individual c m",
        ),
        AlgorithmSpec(
            "NNPC", "NN-PC Classifier", (D_SWITCH,),
            _train_nnpc, NnPcModel,
            "-D individual e c",
        ),
        AlgorithmSpec(
            "KMEANS", "k-Means Classifier", (C_SWITCH, T_SWITCH, D_SWITCH),
            _train_kmeans, KMeansModel,
            "-C individual 5 10 -T sequence 1.0 0.5 2.0 -D individual e",
        ),
        AlgorithmSpec(
            "SVM", "One-Sided SVM Classifier", (S_SWITCH, N_SWITCH, KERNEL_SWITCH, E_SWITCH),
            _train_svm, OcSvmModel,
            "-S individual 0.5 1.0 -N individual 0.01 0.1 -k individual g",
        ),
        AlgorithmSpec(
            "MCSVM", "Multi-Cluster One-Sided SVM Classifier",
            (
                replace(C_SWITCH, default=2),
                S_SWITCH, N_SWITCH, KERNEL_SWITCH, E_SWITCH,
            ),
            _train_mcsvm, McOcSvmModel,
            "-C individual 1 2 -S individual 1.0 -N individual 0.05",
        ),
        AlgorithmSpec(
            "BKNN", "Two-Class KNN Classifier",
            (
                replace(
                    K_SWITCH,
                    default=1,
                    description="K neighbours used",
                    help="The amount of nearest neighbours that vote",
                ),
                D_SWITCH,
            ),
            _train_bknn, BinaryKnnModel,
            "-K individual 1 3 -D individual e",
            one_sided=False,
        ),
    )
}

DEFAULT_ALGORITHM = "KNN"


def get_algorithm(algorithm_id: str) -> AlgorithmSpec:
    try:
        return ALGORITHMS[algorithm_id.upper()]
    except KeyError:
        raise TrainingError(
            f"unknown algorithm '{algorithm_id}'; choose one of {', '.join(ALGORITHMS)}"
        ) from None


def rebuild_model(
    algorithm_id: str,
    hyperparameters: Dict[str, Any],
    norm,
    state: Dict[str, Any],
) -> Classifier:
    return get_algorithm(algorithm_id).model_class.from_state(hyperparameters, norm, state)
