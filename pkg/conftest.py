from typing import Sequence

import numpy as np
import pytest

from app.core.config import settings
from app.modules.arff.schemas import AttributeKind, AttributeSpec
from app.modules.dataset.schemas import ExampleSet, IndexView, ONE_SIDED_LABELS, OTHER, TARGET
from app.modules.dataset.service import make_rng

FIGURE_37_ARFF = """% example ARFF file
@relation 'example 1'
@attribute height numeric
@attribute width numeric
@attribute class {standard, large}
@data
50,20,standard
150,70,large
"""

# 5 rows of each iris species, enough for relabelling and splitting tests
MINI_IRIS_ARFF = """@RELATION iris

@ATTRIBUTE sepallength REAL
@ATTRIBUTE sepalwidth REAL
@ATTRIBUTE petallength REAL
@ATTRIBUTE petalwidth REAL
@ATTRIBUTE class {Iris-setosa,Iris-versicolor,Iris-virginica}

@DATA
5.1,3.5,1.4,0.2,Iris-setosa
4.9,3.0,1.4,0.2,Iris-setosa
4.7,3.2,1.3,0.2,Iris-setosa
4.6,3.1,1.5,0.2,Iris-setosa
5.0,3.6,1.4,0.2,Iris-setosa
7.0,3.2,4.7,1.4,Iris-versicolor
6.4,3.2,4.5,1.5,Iris-versicolor
6.9,3.1,4.9,1.5,Iris-versicolor
5.5,2.3,4.0,1.3,Iris-versicolor
6.5,2.8,4.6,1.5,Iris-versicolor
6.3,3.3,6.0,2.5,Iris-virginica
5.8,2.7,5.1,1.9,Iris-virginica
7.1,3.0,5.9,2.1,Iris-virginica
6.3,2.9,5.6,1.8,Iris-virginica
6.5,3.0,5.8,2.2,Iris-virginica
"""


def one_sided_schema(n_features: int):
    features = tuple(AttributeSpec(name=f"x{i}", kind=AttributeKind.NUMERIC) for i in range(n_features))
    return features + (AttributeSpec(name="class", kind=AttributeKind.NOMINAL, values=ONE_SIDED_LABELS),)


def make_set(targets: Sequence, others: Sequence = (), relation: str = "synthetic") -> ExampleSet:
    targets = np.asarray(targets, dtype=float)
    others = np.asarray(others, dtype=float).reshape(-1, targets.shape[1])
    return ExampleSet(
        relation=relation,
        schema=one_sided_schema(targets.shape[1]),
        features=np.vstack([targets, others]),
        labels=(TARGET,) * len(targets) + (OTHER,) * len(others),
    )


def gaussian_set(seed: int, n_target: int = 40, n_other: int = 40, n_features: int = 2, shift: float = 4.0):
    rng = make_rng(seed)
    targets = rng.normal(0.0, 1.0, size=(n_target, n_features))
    others = rng.normal(shift, 1.0, size=(n_other, n_features))
    return make_set(targets, others)


@pytest.fixture(autouse=True)
def isolated_output_dirs(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setattr(settings, "MODEL_DIR", str(tmp_path / "classifiers"))
    monkeypatch.setattr(settings, "DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setattr(settings, "PROMPT_ANSWERS_FILE", None)


@pytest.fixture
def separable_set() -> ExampleSet:
    return gaussian_set(seed=7)


@pytest.fixture
def separable_view(separable_set) -> IndexView:
    return IndexView.full(separable_set)


@pytest.fixture
def iris_path(tmp_path):
    path = tmp_path / "iris.arff"
    path.write_text(MINI_IRIS_ARFF, encoding="utf-8")
    return path
