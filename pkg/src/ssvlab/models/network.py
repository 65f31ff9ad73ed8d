# src/ssvlab/models/network.py

from typing import Annotated, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ssvlab.schemas.network import AdamHyper, FcnArch, MlpArch

ArchField = Annotated[Union[MlpArch, FcnArch], Field(discriminator="kind")]


class NetworkParams(BaseModel):
    """
    Architecture plus flat parameter vector.

    Layout: for every layer in order, W (out x in, row-major) then b.
    FCN vectors hold the branch block, the trunk block, then the scalar bias.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    arch: ArchField
    theta: np.ndarray

    @model_validator(mode="after")
    def check_theta(self):
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        if theta.size != self.arch.param_count:
            raise ValueError(f"Parameter count {theta.size} does not match architecture ({self.arch.param_count})")
        if not np.all(np.isfinite(theta)):
            raise ValueError("Network parameters must be finite")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        return self

    def with_theta(self, theta: np.ndarray) -> "NetworkParams":
        return NetworkParams(arch=self.arch, theta=theta)


class AdamState(BaseModel):
    """First/second moment estimates and step counter of one optimizer."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: np.ndarray
    v: np.ndarray
    step: int = Field(0, ge=0)
    hyper: AdamHyper = AdamHyper()

    @model_validator(mode="after")
    def check_moments(self):
        m = np.asarray(self.m, dtype=np.float64).reshape(-1)
        v = np.asarray(self.v, dtype=np.float64).reshape(-1)
        if m.shape != v.shape:
            raise ValueError(f"Moment vectors differ in length: {m.size} vs {v.size}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v)
        return self

    @classmethod
    def fresh(cls, size: int, hyper: AdamHyper = AdamHyper()) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size), step=0, hyper=hyper)
