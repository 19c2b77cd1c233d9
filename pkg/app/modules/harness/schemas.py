from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.modules.preprocess.schemas import NormKind


class RosterEntry(BaseModel):
    """One learner in a trend study with its fixed hyperparameters."""
    algorithm: str = Field(..., description="registry id, e.g. KNN, KMEANS, BKNN")
    params: Dict[str, Any] = Field(default_factory=dict)
    label: Optional[str] = Field(None, description="CSV column name; defaults to the algorithm id")

    @property
    def name(self) -> str:
        return self.label or self.algorithm.upper()


class TrendStudyConfig(BaseModel):
    primary_path: str = Field(..., description="one-sided ARFF set: Target plus expected Other")
    secondary_path: str = Field(..., description="ARFF set of unexpected outliers, all labelled Other")
    increments: List[int] = Field(default_factory=lambda: [0, 25, 50, 75, 100, 125, 150, 175, 200])
    runs: int = Field(100, ge=1)
    seed: int = Field(2, ge=0)
    train_percent: float = Field(67.0, gt=0, lt=100)
    roster: List[RosterEntry]
    normalization: NormKind = NormKind.NONE
    workers: Optional[int] = Field(None, ge=1)

    @field_validator("increments")
    @classmethod
    def check_increments(cls, increments: List[int]) -> List[int]:
        if not increments or increments[0] != 0:
            raise ValueError("increments must start at 0")
        if any(b <= a for a, b in zip(increments, increments[1:])):
            raise ValueError("increments must be strictly increasing")
        return increments

    @model_validator(mode="after")
    def check_roster(self):
        if not self.roster:
            raise ValueError("a trend study needs at least one algorithm")
        names = [entry.name for entry in self.roster]
        if len(set(names)) != len(names):
            raise ValueError(f"roster column names must be unique, got {names}")
        return self


class TrendRow(BaseModel):
    """Percentages over runs for one increment."""
    increment: int
    error_mean: float = Field(..., ge=0, le=100)
    error_std: float = Field(..., ge=0)
    ber_mean: float = Field(..., ge=0, le=100)
    ber_std: float = Field(..., ge=0)
    degenerate_runs: int = Field(0, description="runs whose test slice lacked Target or Other")


class TrendTable(BaseModel):
    algorithms: List[str] = Field(..., description="column order, roster order")
    increments: List[int]
    rows: Dict[str, List[TrendRow]]
    runs: int
    seeds: List[int]
    outlier_order: List[int] = Field(default_factory=list, description="secondary row positions in injection order")

    def column(self, algorithm: str, metric: str = "error") -> List[float]:
        return [getattr(row, f"{metric}_mean") for row in self.rows[algorithm]]


class StudyManifest(BaseModel):
    """Everything needed to replay a study."""
    config: TrendStudyConfig
    seeds: List[int]
    outlier_order: List[int] = Field(..., description="secondary row indices in injection order")
    outputs: List[str] = Field(default_factory=list)
    created: str
