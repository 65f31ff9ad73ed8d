# src/ssvlab/schemas/experiment.py

from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ssvlab.core.grids import Grid1D, Grid2D
from ssvlab.schemas.network import ArchTag
from ssvlab.schemas.solver import Burgers1dConfig, BurgersScheme, Integrator, Ns2dConfig


class SystemTag(str, Enum):
    NS2D = "ns2d"
    BURGERS = "burgers"


class HeadTag(str, Enum):
    PHYS = "phys"
    SSV = "ssv"


class TimeSampling(str, Enum):
    """How training times are drawn: tau uniform on the log window, or t uniform."""

    LOG_UNIFORM = "log_uniform"
    UNIFORM = "uniform"


class TargetSource(str, Enum):
    REFERENCE = "reference"
    COLE_HOPF = "cole_hopf"


class InitialCondition(str, Enum):
    TWO_GAUSSIANS = "two_gaussians"
    LAMB_OSEEN = "lamb_oseen"
    BIPOLAR_BOX = "bipolar_box"


def default_ns_config() -> Dict[str, Any]:
    """
    Navier-Stokes experiment defaults: train on [0, 0.3], extrapolate to [0.3, 5].

    Returns:
        Dictionary of ExperimentConfig fields
    """
    return {
        "initial": InitialCondition.TWO_GAUSSIANS,
        "t_max": 0.3,
        "batch": 4096,
        "time_sampling": TimeSampling.LOG_UNIFORM,
        "eval_times_start": 0.3,
        "eval_times_stop": 5.0,
        "eval_times_count": 48,
        "eval_resolution": 256,
        "triptych_times": [0.5, 1.0, 1.5],
        "n": 256,
        "half_width": 20.0,
        "dt": 2.5e-3,
    }


def default_burgers_config() -> Dict[str, Any]:
    """
    Burgers experiment defaults: train on [0, 0.5], extrapolate to [0.5, 5].

    Returns:
        Dictionary of ExperimentConfig fields
    """
    return {
        "initial": InitialCondition.BIPOLAR_BOX,
        "t_max": 0.5,
        "batch": 2048,
        "time_sampling": TimeSampling.UNIFORM,
        "eval_times_start": 0.5,
        "eval_times_stop": 5.0,
        "eval_times_count": 46,
        "eval_resolution": 2048,
        "triptych_times": [1.0, 1.5, 2.0, 2.5],
        "n": 2048,
        "x_min": -15.0,
        "x_max": 15.0,
        "dt": 1e-4,
    }


# Keys absent from a config file fall back to these
SYSTEM_DEFAULTS = {
    SystemTag.NS2D: default_ns_config,
    SystemTag.BURGERS: default_burgers_config,
}


class ExperimentConfig(BaseModel):
    """
    One config drives the reference solve and both heads of a comparison.

    Parsed from a flat KEY=VALUE file; list values are comma separated.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", use_enum_values=False)

    system: SystemTag
    arch: ArchTag = ArchTag.MLP
    C: float = Field(5.0, gt=0)
    t_min: float = Field(0.0, ge=0)
    t_max: float
    batch: int = Field(..., ge=1)
    steps: int = Field(50_000, ge=0)
    seed: int = 0
    time_sampling: TimeSampling
    target_source: TargetSource = TargetSource.REFERENCE
    initial: InitialCondition

    # Evaluation
    eval_times_start: float
    eval_times_stop: float
    eval_times_count: int = Field(..., ge=1)
    eval_resolution: int = Field(..., ge=32)
    triptych_times: List[float]

    # Reference solver
    n: int
    half_width: Optional[float] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    dt: float = Field(..., gt=0)
    t_end: float = Field(5.0, gt=0)
    output_every: float = Field(0.01, gt=0)
    scheme: BurgersScheme = BurgersScheme.COLE_HOPF_EXACT
    integrator: Integrator = Integrator.RK4_INTEGRATING_FACTOR

    # Optimizer / network
    lr: float = Field(1e-3, gt=0)
    lr_final: float = Field(1e-5, ge=0)
    width: Optional[int] = Field(None, ge=1)
    depth: Optional[int] = Field(None, ge=1)
    latent: Optional[int] = Field(None, ge=1)
    record_every: int = Field(100, ge=1)

    # Artifacts
    reference_path: Optional[str] = None
    out_dir: Optional[str] = None
    label: Optional[str] = None

    @model_validator(mode="before")
    @classmethod
    def fill_system_defaults(cls, data: Any):
        if not isinstance(data, dict):
            return data
        normalised = {}
        for key, value in data.items():
            if value is None:
                continue
            name = str(key).strip()
            normalised["C" if name.lower() == "c" else name.lower()] = value
        raw_system = normalised.get("system", "")
        try:
            system = SystemTag(raw_system if isinstance(raw_system, SystemTag) else str(raw_system).strip().lower())
        except ValueError:
            return normalised
        merged = SYSTEM_DEFAULTS[system]()
        merged.update(normalised)
        return merged

    @field_validator("triptych_times", mode="before")
    @classmethod
    def parse_times(cls, v):
        if isinstance(v, str):
            return [float(item) for item in v.split(",") if item.strip()]
        return v

    @field_validator(
        "system", "arch", "time_sampling", "target_source", "initial", "scheme", "integrator", mode="before"
    )
    @classmethod
    def lower_tags(cls, v):
        return v.lower() if isinstance(v, str) else v

    @model_validator(mode="after")
    def check_windows(self):
        if not self.t_min < self.t_max:
            raise ValueError(f"Training window needs t_min < t_max, got [{self.t_min}, {self.t_max}]")
        if self.eval_times_stop < self.eval_times_start:
            raise ValueError("eval_times_stop must not precede eval_times_start")
        if self.t_max > self.t_end or self.eval_times_stop > self.t_end:
            raise ValueError(f"Training and evaluation times must lie within the solver horizon t_end={self.t_end}")
        if self.system == SystemTag.NS2D and self.half_width is None:
            object.__setattr__(self, "half_width", 20.0)
        if self.system == SystemTag.BURGERS and (self.x_min is None or self.x_max is None):
            raise ValueError("Burgers configs need x_min and x_max")
        if self.system == SystemTag.NS2D:
            if self.target_source == TargetSource.COLE_HOPF:
                raise ValueError("target_source=cole_hopf is only available for Burgers")
            if self.initial == InitialCondition.BIPOLAR_BOX:
                raise ValueError("bipolar_box initial data is a Burgers profile")
        elif self.initial != InitialCondition.BIPOLAR_BOX:
            raise ValueError(f"Burgers runs use bipolar_box initial data, got {self.initial.value}")
        # Surfaces grid and time-step violations at parse time
        self.solver_config()
        return self

    @property
    def eval_times(self) -> List[float]:
        if self.eval_times_count == 1:
            return [self.eval_times_start]
        return [float(t) for t in np.linspace(self.eval_times_start, self.eval_times_stop, self.eval_times_count)]

    @property
    def input_dim(self) -> int:
        """Coordinates seen by either head: (x, y, t) / (xi1, xi2, tau) or (x, t) / (xi, tau)."""
        return 3 if self.system == SystemTag.NS2D else 2

    @property
    def spatial_dim(self) -> int:
        return self.input_dim - 1

    def solver_config(self) -> Ns2dConfig | Burgers1dConfig:
        """Reference-solver settings implied by this experiment."""
        if self.system == SystemTag.NS2D:
            return Ns2dConfig(
                grid=Grid2D(n=self.n, half_width=self.half_width),
                dt=self.dt,
                t_end=self.t_end,
                output_every=self.output_every,
                integrator=self.integrator,
            )
        return Burgers1dConfig(
            grid=Grid1D(n=self.n, x_min=self.x_min, x_max=self.x_max),
            dt=self.dt,
            t_end=self.t_end,
            output_every=self.output_every,
            scheme=self.scheme,
        )

    def hyperparameters(self) -> Dict[str, Any]:
        """Everything both heads must share, for the parity check."""
        return self.model_dump(
            mode="json",
            include={
                "system", "arch", "C", "t_min", "t_max", "batch", "steps", "seed",
                "time_sampling", "lr", "lr_final", "width", "depth", "latent",
            },
        )


class EvalGridSpec(BaseModel):
    """Evaluation grid: `resolution` cells per axis over the window at each time."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    resolution: int = Field(256, ge=32)
    C: float = Field(5.0, gt=0)
    times: List[float] = []

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> "EvalGridSpec":
        return cls(resolution=cfg.eval_resolution, C=cfg.C, times=cfg.eval_times)
