"""
In-memory data model: ExampleSet, Example and the index views every split uses.

An ExampleSet is built once from an ARFF file and never changes afterwards.
Splits, folds and injected test sets are IndexViews, ordered index references
into that one parent.
"""

from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

import numpy as np

from app.modules.arff.schemas import AttributeKind, AttributeSpec

TARGET = "Target"
OTHER = "Other"
ONE_SIDED_LABELS = (OTHER, TARGET)


@dataclass(frozen=True)
class Example:
    features: Tuple[float, ...]
    label: str


@dataclass(frozen=True, eq=False)
class ExampleSet:
    """
    Parsed dataset. The last schema entry is the nominal class attribute;
    `features` holds the remaining columns as a read-only (n, d) float array.

    Nominal feature columns are stored as the index of the value in the
    attribute's domain.
    """
    relation: str
    schema: Tuple[AttributeSpec, ...]
    features: np.ndarray
    labels: Tuple[str, ...]

    def __post_init__(self):
        schema = tuple(self.schema)
        if not schema:
            raise ValueError("an example set needs at least a class attribute")
        names = [attribute.name for attribute in schema]
        if len(set(names)) != len(names):
            raise ValueError("attribute names must be unique")
        if schema[-1].kind != AttributeKind.NOMINAL:
            raise ValueError("the class attribute (last attribute) must be nominal")

        labels = tuple(str(label) for label in self.labels)
        n_features = len(schema) - 1
        features = np.array(self.features, dtype=float)
        if features.size == 0:
            features = features.reshape(len(labels), n_features)
        if features.ndim != 2 or features.shape != (len(labels), n_features):
            raise ValueError(
                f"features shape {features.shape} does not match "
                f"{len(labels)} examples x {n_features} attributes"
            )
        domain = set(schema[-1].values)
        unknown = sorted(set(labels) - domain)
        if unknown:
            raise ValueError(f"labels {unknown} are not in the class domain {list(schema[-1].values)}")
        features.setflags(write=False)

        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", features)

    @property
    def class_attribute(self) -> AttributeSpec:
        return self.schema[-1]

    @property
    def feature_attributes(self) -> Tuple[AttributeSpec, ...]:
        return self.schema[:-1]

    @property
    def n_features(self) -> int:
        return len(self.schema) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def example(self, index: int) -> Example:
        return Example(features=tuple(float(v) for v in self.features[index]), label=self.labels[index])

    def examples(self) -> Iterator[Example]:
        for index in range(len(self)):
            yield self.example(index)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExampleSet):
            return NotImplemented
        return (
            self.relation == other.relation
            and self.schema == other.schema
            and self.labels == other.labels
            and np.array_equal(self.features, other.features)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IndexView:
    """Ordered, duplicate-free index references into a parent ExampleSet."""
    parent: ExampleSet
    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        size = len(self.parent)
        for index in indices:
            if index < 0 or index >= size:
                raise IndexError(f"index {index} outside [0, {size})")
        if len(set(indices)) != len(indices):
            raise ValueError("an index view cannot repeat an index")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def full(cls, parent: ExampleSet) -> "IndexView":
        return cls(parent, tuple(range(len(parent))))

    def with_indices(self, indices: Sequence[int]) -> "IndexView":
        return IndexView(self.parent, tuple(indices))

    def features(self) -> np.ndarray:
        if not self.indices:
            return np.empty((0, self.parent.n_features))
        return self.parent.features[np.asarray(self.indices, dtype=int)]

    def labels(self) -> Tuple[str, ...]:
        return tuple(self.parent.labels[i] for i in self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IndexView):
            return NotImplemented
        return self.parent is other.parent and self.indices == other.indices

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SplitPlan:
    train: IndexView
    test: IndexView

    def __post_init__(self):
        if set(self.train.indices) & set(self.test.indices):
            raise ValueError("train and test views overlap")


@dataclass(frozen=True, eq=False)
class FoldPlan:
    folds: Tuple[IndexView, ...]

    def __post_init__(self):
        seen = set()
        for fold in self.folds:
            if seen & set(fold.indices):
                raise ValueError("folds overlap")
            seen.update(fold.indices)

    def __len__(self) -> int:
        return len(self.folds)
