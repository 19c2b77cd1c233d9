from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class KernelKind(str, Enum):
    """Kernel families, valued by their command-line token."""
    GAUSSIAN = "g"
    POLYNOMIAL = "p"


class KernelSpec(BaseModel):
    """
    gaussian: K(x, y) = exp(-|x - y|^2 / (2 width^2))
    polynomial: K(x, y) = <x, y>^exponent
    """
    model_config = ConfigDict(frozen=True)

    kind: KernelKind = KernelKind.GAUSSIAN
    width: float = Field(1.0, gt=0, description="gaussian width (sigma)")
    exponent: float = Field(1.0, ge=1, description="polynomial exponent")
