from enum import Enum

from pydantic import BaseModel, Field


class DistanceMetric(str, Enum):
    """Distance metrics, valued by their command-line token."""
    EUCLIDEAN = "e"
    MANHATTAN = "m"
    COSINE = "c"

    @property
    def full_name(self) -> str:
        return {"e": "Euclidean", "m": "Manhattan", "c": "Cosine"}[self.value]


class ConfusionMatrix(BaseModel):
    """Counts with Target as the positive class."""
    tp: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp,
            fn=self.fn + other.fn,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
        )


class EvalReport(BaseModel):
    matrix: ConfusionMatrix
    error: float = Field(..., ge=0.0, le=1.0)
    sensitivity: float = Field(..., ge=0.0, le=1.0)
    specificity: float = Field(..., ge=0.0, le=1.0)
    bar: float = Field(..., ge=0.0, le=1.0)
    ber: float = Field(..., ge=0.0, le=1.0)
    degenerate: bool = Field(False, description="a rate had a zero denominator and was set to 1")


class MetricSummary(BaseModel):
    mean: float
    std: float


class ReportSummary(BaseModel):
    """Mean and sample standard deviation of each rate over several reports."""
    count: int
    error: MetricSummary
    sensitivity: MetricSummary
    specificity: MetricSummary
    bar: MetricSummary
    ber: MetricSummary
