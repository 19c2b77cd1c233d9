"""
Schemas for experiment configuration and results
"""

import itertools
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, model_validator

from app.modules.metrics.schemas import ConfusionMatrix, EvalReport, ReportSummary
from app.modules.preprocess.schemas import NormalizationMode, NormKind

GridValue = Union[int, float, str]


class Technique(str, Enum):
    PERFORMANCE_ESTIMATION = "pe"
    MODEL_SELECTION = "ms"

    @property
    def full_name(self) -> str:
        return "Performance Estimation" if self is Technique.PERFORMANCE_ESTIMATION else "Model Selection"


class SplitMethod(str, Enum):
    PERCENTAGE = "ps"
    CROSS_VALIDATION = "cv"

    @property
    def full_name(self) -> str:
        return "Percentage Split" if self is SplitMethod.PERCENTAGE else "Cross Validation"


class SplitConfig(BaseModel):
    method: SplitMethod = SplitMethod.PERCENTAGE
    percent: float = Field(50.0, gt=0, lt=100, description="training share for a percentage split")
    folds: int = Field(3, ge=2, description="fold count for cross validation")


class ParamGrid(BaseModel):
    """Ordered value lists per hyperparameter, in the algorithm's switch order."""
    values: Dict[str, List[GridValue]] = Field(default_factory=dict)
    notifications: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_lists(self):
        for name, options in self.values.items():
            if not options:
                raise ValueError(f"hyperparameter '{name}' has an empty value list")
        return self

    @property
    def size(self) -> int:
        size = 1
        for options in self.values.values():
            size *= len(options)
        return size

    def combinations(self) -> List[Dict[str, GridValue]]:
        names = list(self.values)
        return [dict(zip(names, combo)) for combo in itertools.product(*self.values.values())]


class ExperimentConfig(BaseModel):
    """Every option of an experiment; defaults follow the command-line defaults."""
    example_set_path: str = Field(..., description="ARFF file holding the example set")
    relabel: bool = False
    target_label: Optional[str] = Field(None, description="class mapped to Target when relabelling")
    normalization: NormKind = NormKind.NONE
    algorithm: str = "KNN"
    technique: Technique = Technique.PERFORMANCE_ESTIMATION
    outer: SplitConfig = Field(default_factory=SplitConfig)
    runs: int = Field(1, ge=1)
    seed: int = Field(2, ge=0)
    inner: SplitConfig = Field(default_factory=SplitConfig)
    grid: Optional[ParamGrid] = None
    grid_text: str = Field("", description="switch string parsed when no grid is given")
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def check_relabel_target(self):
        if self.relabel and not self.target_label:
            raise ValueError("relabelling needs a target class")
        return self


class TrialResult(BaseModel):
    """One grid combination scored on the inner validation split(s)."""
    params: Dict[str, GridValue]
    error: Optional[float] = Field(None, description="mean inner error; None when training failed")
    matrix: ConfusionMatrix = Field(default_factory=ConfusionMatrix)
    failed: Optional[str] = None


class SelectionResult(BaseModel):
    best_params: Dict[str, GridValue]
    best_error: float
    trials: List[TrialResult]


class FoldResult(BaseModel):
    fold: int
    train_indices: List[int]
    test_indices: List[int]
    params: Dict[str, GridValue]
    inner_error: Optional[float] = None
    trials: List[TrialResult] = Field(default_factory=list)
    report: EvalReport


class RunResult(BaseModel):
    run: int
    seed: int
    folds: List[FoldResult]
    report: EvalReport = Field(..., description="fold rates averaged, fold counts summed")
    fold_summary: ReportSummary


class ExperimentResult(BaseModel):
    config: ExperimentConfig
    grid: ParamGrid
    runs: List[RunResult]
    summary: ReportSummary
    best_params: Optional[Dict[str, Any]] = None
    best_inner_error: Optional[float] = None
    log_path: Optional[str] = None


class SavedModelDocument(BaseModel):
    """JSON body of a `.oscal` file."""
    format_version: int
    algorithm: str
    hyperparameters: Dict[str, Any]
    normalization: NormalizationMode
    state: Dict[str, Any]
    created: str


class EvaluateSavedRequest(BaseModel):
    model_path: str
    test_set_path: str
    target_label: Optional[str] = Field(None, description="relabel the test set first when given")
