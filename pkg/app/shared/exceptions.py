from typing import Optional

from fastapi import HTTPException, status


class OscailError(Exception):
    """Base class for every toolkit failure."""


class ArffParseError(OscailError):
    """Malformed ARFF input; carries the offending line number."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class RelabelError(OscailError):
    """Target class is not part of the class attribute's domain."""


class SplitError(OscailError):
    """A percentage split or fold plan cannot be built for this view."""


class ArityMismatchError(OscailError):
    """Feature vector length differs from what a model or schema expects."""

    def __init__(self, expected: int, found: int, what: str = "feature vector"):
        self.expected = expected
        self.found = found
        super().__init__(f"{what} arity mismatch: expected {expected} features, found {found}")


class DistanceError(OscailError):
    """Distance undefined for the given vectors (e.g. zero vector under cosine)."""


class TrainingError(OscailError):
    """A learner cannot be trained with the given data or hyperparameters."""


class SolverConvergenceError(TrainingError):
    """The SMO solver hit its pass limit before reaching KKT tolerance."""


class EvaluationError(OscailError):
    """Predictions and truths cannot be scored."""


class ModelFormatError(OscailError):
    """A saved classifier file is unreadable or truncated."""


class ModelVersionError(ModelFormatError):
    """A saved classifier file declares an unknown format version."""


class StudyConfigError(OscailError):
    """Trend study inputs are inconsistent."""


class PromptExhaustedError(OscailError):
    """No more answers are available for an interactive prompt."""


class ValidationException(HTTPException):
    """Exception for validation errors."""

    def __init__(self, detail: str = "Validation error"):
        super().__init__(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=detail
        )


class ResourceNotFoundException(HTTPException):
    """Exception for resource not found."""

    def __init__(self, resource: str = "Resource"):
        super().__init__(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"{resource} not found"
        )
