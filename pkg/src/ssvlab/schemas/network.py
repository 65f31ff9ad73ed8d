# src/ssvlab/schemas/network.py

from enum import Enum
from typing import List, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Activation(str, Enum):
    TANH = "tanh"
    SIN = "sin"
    SOFTPLUS = "softplus"


class ArchTag(str, Enum):
    MLP = "mlp"
    FCN = "fcn"


class MlpArch(BaseModel):
    """Fully connected network R^m -> R^out; hidden layers use the activation, the last layer is affine."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["mlp"] = "mlp"
    input_dim: int = Field(..., ge=1)
    hidden: List[int]
    output_dim: int = Field(1, ge=1)
    activation: Activation = Activation.TANH

    @field_validator("hidden")
    @classmethod
    def check_hidden(cls, v):
        if len(v) < 1:
            raise ValueError("An MLP needs at least one hidden layer")
        if any(w < 1 for w in v):
            raise ValueError(f"Hidden widths must be >= 1, got {v}")
        return list(v)

    @property
    def layer_sizes(self) -> List[int]:
        return [self.input_dim, *self.hidden, self.output_dim]

    @property
    def param_count(self) -> int:
        sizes = self.layer_sizes
        return sum(sizes[i + 1] * sizes[i] + sizes[i + 1] for i in range(len(sizes) - 1))


class FcnArch(BaseModel):
    """Factorized branch-trunk network: b + sum_k B_k(s) T_k(z)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["fcn"] = "fcn"
    branch: MlpArch
    trunk: MlpArch

    @model_validator(mode="after")
    def check_latent(self):
        if self.branch.input_dim != 1:
            raise ValueError(f"Branch input must be the scalar time-like coordinate, got dim {self.branch.input_dim}")
        if self.branch.output_dim != self.trunk.output_dim:
            raise ValueError(
                f"Branch and trunk must share the latent width, got {self.branch.output_dim} vs {self.trunk.output_dim}"
            )
        return self

    @property
    def latent(self) -> int:
        return self.branch.output_dim

    @property
    def input_dim(self) -> int:
        return self.trunk.input_dim

    @property
    def param_count(self) -> int:
        return self.branch.param_count + self.trunk.param_count + 1


NetworkArch = Union[MlpArch, FcnArch]


class LrSchedule(str, Enum):
    CONSTANT = "constant"
    COSINE = "cosine"


class AdamHyper(BaseModel):
    """Adam hyperparameters shared verbatim by both heads of a comparison."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lr: float = Field(1e-3, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    eps: float = Field(1e-8, gt=0)
    schedule: LrSchedule = LrSchedule.COSINE
    lr_final: float = Field(1e-5, ge=0)
