"""
Saved classifier files (`.oscal`).

Layout: a header line `OSCAL/<version> <ALGORITHM>` followed by a JSON
document with the hyperparameters, normalization mode, learned state and
creation time. Reals are written with shortest round-trip precision.
"""

import logging
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from app.shared.classifier import Classifier
from app.shared.exceptions import ModelFormatError, ModelVersionError, TrainingError
from app.shared.utils import unique_path, utc_timestamp
from app.modules.experiment.registry import rebuild_model
from app.modules.experiment.schemas import SavedModelDocument

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
SUFFIX = ".oscal"
_HEADER = re.compile(r"^OSCAL/(\S+) (\S+)$")


def dumps_model(model: Classifier, created: str) -> str:
    document = SavedModelDocument(
        format_version=FORMAT_VERSION,
        algorithm=model.algorithm,
        hyperparameters=model.hyperparameters(),
        normalization=model.norm,
        state=model.state(),
        created=created,
    )
    return f"OSCAL/{FORMAT_VERSION} {model.algorithm}\n{document.model_dump_json(indent=2)}\n"


def loads_model(text: str) -> Classifier:
    header, _, body = text.partition("\n")
    match = _HEADER.match(header.strip())
    if not match:
        raise ModelFormatError("missing OSCAL header line")
    version, algorithm = match.groups()
    if version != str(FORMAT_VERSION):
        raise ModelVersionError(f"unsupported classifier file version '{version}' (expected {FORMAT_VERSION})")

    try:
        document = SavedModelDocument.model_validate_json(body)
    except ValidationError as exc:
        raise ModelFormatError(f"unreadable or truncated classifier file: {exc.error_count()} problem(s)") from exc
    if document.algorithm != algorithm:
        raise ModelFormatError(f"header names {algorithm} but the body holds {document.algorithm}")

    try:
        return rebuild_model(algorithm, document.hyperparameters, document.normalization, document.state)
    except TrainingError as exc:
        raise ModelFormatError(str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"incomplete learned state: {exc}") from exc


def save_model(model: Classifier, directory: Union[str, Path]) -> Path:
    """Write `<ALGORITHM>_<UTC timestamp>.oscal` into `directory` and return its path."""
    now = datetime.now(timezone.utc)
    path = unique_path(Path(directory), f"{model.algorithm}_{utc_timestamp(now)}", SUFFIX)
    path.write_text(dumps_model(model, now.isoformat()), encoding="utf-8")
    logger.info(f"Saved {model.algorithm} classifier to {path}")
    return path


def load_model(path: Union[str, Path]) -> Classifier:
    """Read a saved classifier; missing files raise FileNotFoundError."""
    text = Path(path).read_text(encoding="utf-8")
    model = loads_model(text)
    logger.info(f"Loaded {model.algorithm} classifier from {path}")
    return model
