from typing import List, Optional

from pydantic import BaseModel, Field

from app.modules.experiment.schemas import ExperimentConfig, ParamGrid, SplitConfig, Technique
from app.modules.preprocess.schemas import NormKind


class CliInvocation(BaseModel):
    """The experimenter's argument line resolved to experiment options."""
    raw: str = ""
    example_set_path: Optional[str] = None
    relabel: bool = False
    normalization: NormKind = NormKind.NONE
    algorithm: str = "KNN"
    technique: Technique = Technique.PERFORMANCE_ESTIMATION
    outer: SplitConfig = Field(default_factory=SplitConfig)
    runs: int = 1
    seed: int = 2
    inner: SplitConfig = Field(default_factory=SplitConfig)
    notifications: List[str] = Field(default_factory=list)
    show_usage: bool = False

    def to_config(
        self,
        example_set_path: Optional[str] = None,
        target_label: Optional[str] = None,
        grid: Optional[ParamGrid] = None,
    ) -> ExperimentConfig:
        return ExperimentConfig(
            example_set_path=example_set_path or self.example_set_path,
            relabel=target_label is not None,
            target_label=target_label,
            normalization=self.normalization,
            algorithm=self.algorithm,
            technique=self.technique,
            outer=self.outer,
            runs=self.runs,
            seed=self.seed,
            inner=self.inner,
            grid=grid,
        )
