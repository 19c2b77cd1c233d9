"""
Seeded shuffling and stratified splitting over index views.

All randomness goes through `make_rng`, a PCG64 generator seeded with the
caller's integer seed. Run r of an experiment uses seed base_seed + r.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np

from app.shared.exceptions import ArityMismatchError, SplitError
from app.modules.dataset.schemas import ExampleSet, FoldPlan, IndexView, OTHER, SplitPlan, TARGET

logger = logging.getLogger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def shuffle(view: IndexView, seed: int) -> IndexView:
    """Permutation of `view` determined only by its indices and `seed`."""
    order = make_rng(seed).permutation(len(view))
    return view.with_indices([view.indices[i] for i in order])


def _strata(view: IndexView) -> Dict[str, List[int]]:
    """Indices of `view` grouped by label, labels sorted, view order kept inside a group."""
    groups: Dict[str, List[int]] = {}
    for index in view.indices:
        groups.setdefault(view.parent.labels[index], []).append(index)
    return {label: groups[label] for label in sorted(groups)}


def stratified_percentage_split(view: IndexView, train_percent: float, seed: int) -> SplitPlan:
    """
    Split `view` so both sides keep the Target/Other proportions.

    Each stratum is shuffled with one generator seeded by `seed` and the first
    floor(p/100 * size + 0.5) members go to training. If that leaves a side
    empty, one index is moved over from the other side.
    """
    if not 0 < train_percent < 100:
        raise SplitError(f"train percentage must lie strictly between 0 and 100, got {train_percent}")
    strata = _strata(view)
    for label in (TARGET, OTHER):
        if label not in strata:
            raise SplitError(f"cannot split: the view holds no '{label}' examples")
    if len(view) < 2:
        raise SplitError("a split needs at least one example on each side")

    rng = make_rng(seed)
    train: List[int] = []
    test: List[int] = []
    for members in strata.values():
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        cut = int(np.floor(train_percent / 100.0 * len(shuffled) + 0.5))
        train.extend(shuffled[:cut])
        test.extend(shuffled[cut:])

    if not train:
        train.append(test.pop())
    elif not test:
        test.append(train.pop())

    return SplitPlan(train=view.with_indices(train), test=view.with_indices(test))


def stratified_kfold(view: IndexView, n: int, seed: int) -> FoldPlan:
    """
    Deal each shuffled stratum round-robin over `n` folds.

    The dealing pointer starts at fold seed mod n and carries on from one
    stratum to the next, so overall fold sizes differ by at most one.
    """
    if n < 2:
        raise SplitError(f"cross validation needs at least 2 folds, got {n}")
    if n > len(view):
        raise SplitError(
            f"cannot run {n}-fold cross validation on only {len(view)} examples"
        )

    rng = make_rng(seed)
    folds: List[List[int]] = [[] for _ in range(n)]
    pointer = seed % n
    for members in _strata(view).values():
        for position in rng.permutation(len(members)):
            folds[pointer].append(members[position])
            pointer = (pointer + 1) % n

    return FoldPlan(folds=tuple(view.with_indices(fold) for fold in folds))


def fold_split(plan: FoldPlan, fold: int) -> SplitPlan:
    """Fold `fold` as the test side, every other fold (in fold order) as training."""
    test = plan.folds[fold]
    train = [index for i, other in enumerate(plan.folds) if i != fold for index in other.indices]
    return SplitPlan(train=test.with_indices(train), test=test)


def cv_splits(view: IndexView, n: int, seed: int) -> List[SplitPlan]:
    plan = stratified_kfold(view, n, seed)
    return [fold_split(plan, fold) for fold in range(len(plan))]


def targets_of(view: IndexView) -> IndexView:
    return view.with_indices([i for i in view.indices if view.parent.labels[i] == TARGET])


def others_of(view: IndexView) -> IndexView:
    return view.with_indices([i for i in view.indices if view.parent.labels[i] == OTHER])


def concat_example_sets(primary: ExampleSet, secondary: ExampleSet) -> Tuple[ExampleSet, range]:
    """
    One parent holding the primary rows followed by the secondary rows, the
    latter all labelled Other.

    Returns the combined set and the index range the secondary rows occupy.
    """
    if secondary.n_features != primary.n_features:
        raise ArityMismatchError(primary.n_features, secondary.n_features, what="secondary set")
    if OTHER not in primary.class_attribute.values:
        raise SplitError("the primary set must be one-sided (Target/Other) before outliers are added")

    combined = ExampleSet(
        relation=primary.relation,
        schema=primary.schema,
        features=np.vstack([primary.features, secondary.features]),
        labels=primary.labels + (OTHER,) * len(secondary),
    )
    logger.debug(f"Combined {len(primary)} primary and {len(secondary)} secondary examples")
    return combined, range(len(primary), len(combined))
