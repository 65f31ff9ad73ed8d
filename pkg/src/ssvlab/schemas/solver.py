# src/ssvlab/schemas/solver.py

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ssvlab.core.grids import Grid1D, Grid2D

# Largest RK4 step on the negative real axis is ~2.785; the central second
# difference has spectral radius 4/dx^2.
RK4_DIFFUSION_LIMIT = 2.785 / 4.0


class Integrator(str, Enum):
    RK4_INTEGRATING_FACTOR = "rk4-integrating-factor"


class BurgersScheme(str, Enum):
    COLE_HOPF_EXACT = "cole-hopf-exact"
    CENTRAL_FD = "central-fd"


def _steps_per_output(dt: float, output_every: float) -> int:
    ratio = output_every / dt
    steps = int(round(ratio))
    if steps < 1 or abs(ratio - steps) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"output_every ({output_every}) must be a whole multiple of dt ({dt})")
    return steps


def _check_horizon(t_end: float, output_every: float) -> None:
    ratio = t_end / output_every
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"t_end ({t_end}) must be a whole multiple of output_every ({output_every})")


class Ns2dConfig(BaseModel):
    """Pseudo-spectral vorticity solver settings (nu = 1, periodic box)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: Grid2D = Grid2D(n=256, half_width=20.0)
    dt: float = Field(2.5e-3, gt=0)
    t_end: float = Field(5.0, gt=0)
    output_every: float = Field(0.01, gt=0)
    dealias: bool = True
    integrator: Integrator = Integrator.RK4_INTEGRATING_FACTOR
    # Test hook: pure heat flow when False
    advection: bool = True
    # Add back the solid-body rotation removed with the periodic zero mode
    whole_plane_correction: bool = True
    # Advective CFL bound: dt * max|u| / h <= cfl_limit
    cfl_limit: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def check_cadence(self):
        _steps_per_output(self.dt, self.output_every)
        _check_horizon(self.t_end, self.output_every)
        if self.output_every > self.t_end + 1e-12:
            raise ValueError("output_every must not exceed t_end")
        return self

    @property
    def steps_per_output(self) -> int:
        return _steps_per_output(self.dt, self.output_every)

    @property
    def output_count(self) -> int:
        """Snapshots including t = 0."""
        return int(round(self.t_end / self.output_every)) + 1


class Burgers1dConfig(BaseModel):
    """Viscous Burgers reference settings (viscosity 1, zero Dirichlet far boundaries)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: Grid1D = Grid1D(n=2048, x_min=-15.0, x_max=15.0)
    dt: float = Field(1e-4, gt=0)
    t_end: float = Field(5.0, gt=0)
    output_every: float = Field(0.01, gt=0)
    scheme: BurgersScheme = BurgersScheme.COLE_HOPF_EXACT
    # Boundary magnitude above which a warning is logged
    boundary_tolerance: float = Field(1e-10, gt=0)

    @model_validator(mode="after")
    def check_stability(self):
        _steps_per_output(self.dt, self.output_every)
        _check_horizon(self.t_end, self.output_every)
        if self.scheme == BurgersScheme.CENTRAL_FD:
            limit = RK4_DIFFUSION_LIMIT * self.grid.spacing ** 2
            if self.dt > limit:
                raise ValueError(f"dt={self.dt} exceeds the RK4 diffusion bound {limit:.3e} for this grid")
        return self

    @property
    def steps_per_output(self) -> int:
        return _steps_per_output(self.dt, self.output_every)

    @property
    def output_count(self) -> int:
        return int(round(self.t_end / self.output_every)) + 1
