from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class AttributeKind(str, Enum):
    NUMERIC = "numeric"
    NOMINAL = "nominal"


class AttributeSpec(BaseModel):
    """One `@attribute` declaration."""
    model_config = ConfigDict(frozen=True)

    name: str
    kind: AttributeKind
    values: Tuple[str, ...] = ()  # nominal domain, declaration order

    @model_validator(mode="after")
    def check_domain(self):
        if self.kind == AttributeKind.NOMINAL:
            if not self.values:
                raise ValueError(f"nominal attribute '{self.name}' has an empty value list")
            if len(set(self.values)) != len(self.values):
                raise ValueError(f"nominal attribute '{self.name}' repeats a value")
        elif self.values:
            raise ValueError(f"numeric attribute '{self.name}' cannot carry nominal values")
        return self


class RelabelProvenance(BaseModel):
    """Where a one-sided set came from; drives the banner of the written file."""
    model_config = ConfigDict(frozen=True)

    original_relation: str
    target_label: str
    original_class_values: List[str]

    @model_validator(mode="after")
    def check_target(self):
        if self.target_label not in self.original_class_values:
            raise ValueError(
                f"target '{self.target_label}' is not one of {self.original_class_values}"
            )
        return self
