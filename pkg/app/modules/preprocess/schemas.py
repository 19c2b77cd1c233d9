from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class NormKind(str, Enum):
    NONE = "none"
    PER_INSTANCE = "per_instance"
    PER_ATTRIBUTE = "per_attribute"


class NormalizationMode(BaseModel):
    """
    How feature vectors are rescaled before training and prediction.

    Only per_attribute carries fitted state: per-column minima and maxima
    taken from the training view.
    """
    model_config = ConfigDict(frozen=True)

    kind: NormKind = NormKind.NONE
    minima: Tuple[float, ...] = ()
    maxima: Tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_fitted_columns(self):
        if self.kind == NormKind.PER_ATTRIBUTE:
            if len(self.minima) != len(self.maxima):
                raise ValueError("per_attribute normalization needs one (min, max) pair per column")
        elif self.minima or self.maxima:
            raise ValueError(f"{self.kind.value} normalization carries no fitted columns")
        return self
