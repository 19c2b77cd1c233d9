"""
Study datasets.

Digits: the UCI multi-feature "profile correlations" file (2000 rows of 216
features, 200 rows per digit 0-9 in order). Digit 2 is the Target, digit 3
the expected Other, and 25 rows of each remaining digit form the secondary
set of unexpected outliers.

Solvent analogue: overlapping Gaussian mixtures for Target and expected
Other plus a displaced mixture for the unexpected outliers.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import httpx
import numpy as np

from app.core.config import settings
from app.shared.exceptions import StudyConfigError
from app.modules.arff.schemas import AttributeKind, AttributeSpec
from app.modules.arff.service import write_arff_file
from app.modules.dataset.schemas import ExampleSet, ONE_SIDED_LABELS, OTHER, TARGET
from app.modules.dataset.service import make_rng

logger = logging.getLogger(__name__)

DIGIT_FEATURES = 216
ROWS_PER_DIGIT = 200
DIGITS = tuple(range(10))
RAW_DIGITS_FILE = "mfeat-fac"


def _one_sided_schema(prefix: str, n_features: int) -> Tuple[AttributeSpec, ...]:
    features = tuple(
        AttributeSpec(name=f"{prefix}{i + 1}", kind=AttributeKind.NUMERIC) for i in range(n_features)
    )
    return features + (AttributeSpec(name="class", kind=AttributeKind.NOMINAL, values=ONE_SIDED_LABELS),)


def download_digits(destination: Union[str, Path], url: Optional[str] = None) -> Path:
    """Fetch the raw profile-correlation file unless it is already on disk."""
    destination = Path(destination)
    if destination.exists():
        logger.info(f"Using cached digits file {destination}")
        return destination
    url = url or settings.DIGITS_URL
    logger.info(f"Downloading {url}")
    response = httpx.get(url, timeout=settings.HTTP_TIMEOUT, follow_redirects=True)
    response.raise_for_status()
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(response.text, encoding="utf-8")
    return destination


def parse_digit_profiles(text: str) -> np.ndarray:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if len(rows) != ROWS_PER_DIGIT * len(DIGITS):
        raise StudyConfigError(f"expected {ROWS_PER_DIGIT * len(DIGITS)} digit rows, found {len(rows)}")
    features = np.array(rows, dtype=float)
    if features.shape[1] != DIGIT_FEATURES:
        raise StudyConfigError(f"expected {DIGIT_FEATURES} features per row, found {features.shape[1]}")
    return features


def digit_rows(features: np.ndarray, digit: int) -> np.ndarray:
    return features[digit * ROWS_PER_DIGIT:(digit + 1) * ROWS_PER_DIGIT]


def build_digit_sets(
    features: np.ndarray,
    target_digit: int = 2,
    expected_digit: int = 3,
    per_remaining_digit: int = 25,
) -> Tuple[ExampleSet, ExampleSet]:
    """Primary (Target + expected Other) and secondary (unexpected Other) sets."""
    if target_digit == expected_digit:
        raise StudyConfigError("the target and expected outlier digits must differ")
    schema = _one_sided_schema("fac", features.shape[1])

    target, expected = digit_rows(features, target_digit), digit_rows(features, expected_digit)
    primary = ExampleSet(
        relation="digits_primary",
        schema=schema,
        features=np.vstack([target, expected]),
        labels=(TARGET,) * len(target) + (OTHER,) * len(expected),
    )
    remaining = [d for d in DIGITS if d not in (target_digit, expected_digit)]
    unexpected = np.vstack([digit_rows(features, d)[:per_remaining_digit] for d in remaining])
    secondary = ExampleSet(
        relation="digits_secondary",
        schema=schema,
        features=unexpected,
        labels=(OTHER,) * len(unexpected),
    )
    return primary, secondary


def prepare_digit_study(data_dir: Union[str, Path, None] = None, url: Optional[str] = None) -> Tuple[Path, Path]:
    data_dir = Path(data_dir or settings.DATA_DIR)
    raw = download_digits(data_dir / RAW_DIGITS_FILE, url)
    primary, secondary = build_digit_sets(parse_digit_profiles(raw.read_text(encoding="utf-8")))
    primary_path, secondary_path = data_dir / "digits_primary.arff", data_dir / "digits_secondary.arff"
    write_arff_file(primary, str(primary_path))
    write_arff_file(secondary, str(secondary_path))
    logger.info(f"Digit study sets written: {len(primary)} primary, {len(secondary)} secondary examples")
    return primary_path, secondary_path


def _mixture(rng: np.random.Generator, centres: Sequence[np.ndarray], count: int, spread: float) -> np.ndarray:
    picks = rng.integers(0, len(centres), size=count)
    return np.array([centres[p] for p in picks]) + rng.normal(0.0, spread, size=(count, len(centres[0])))


def generate_solvent_sets(
    seed: int = 2,
    n_features: int = 10,
    n_target: int = 150,
    n_other: int = 150,
    n_unexpected: int = 50,
    separation: float = 1.5,
    displacement: float = 8.0,
) -> Tuple[ExampleSet, ExampleSet]:
    """
    Synthetic stand-in for spectra: Target and expected Other are
    two-component mixtures `separation` apart along the first axis; the
    unexpected outliers sit `displacement` away on the opposite side.
    """
    rng = make_rng(seed)
    axis = np.zeros(n_features)
    axis[0] = 1.0
    offset = np.zeros(n_features)
    offset[1] = 1.0

    target_centres = [np.zeros(n_features), offset]
    other_centres = [c + separation * axis for c in target_centres]
    unexpected_centres = [c - displacement * axis for c in target_centres]

    target = _mixture(rng, target_centres, n_target, 1.0)
    other = _mixture(rng, other_centres, n_other, 1.0)
    unexpected = _mixture(rng, unexpected_centres, n_unexpected, 1.0)

    schema = _one_sided_schema("w", n_features)
    primary = ExampleSet(
        relation="solvent_primary",
        schema=schema,
        features=np.vstack([target, other]),
        labels=(TARGET,) * n_target + (OTHER,) * n_other,
    )
    secondary = ExampleSet(
        relation="solvent_secondary",
        schema=schema,
        features=unexpected,
        labels=(OTHER,) * n_unexpected,
    )
    return primary, secondary


def prepare_solvent_study(data_dir: Union[str, Path, None] = None, seed: int = 2) -> Tuple[Path, Path]:
    data_dir = Path(data_dir or settings.DATA_DIR)
    data_dir.mkdir(parents=True, exist_ok=True)
    primary, secondary = generate_solvent_sets(seed)
    primary_path, secondary_path = data_dir / "solvent_primary.arff", data_dir / "solvent_secondary.arff"
    write_arff_file(primary, str(primary_path))
    write_arff_file(secondary, str(secondary_path))
    return primary_path, secondary_path
