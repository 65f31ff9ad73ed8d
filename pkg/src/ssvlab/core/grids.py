# src/ssvlab/core/grids.py

from typing import Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ssvlab.core.errors import DomainError


class Grid1D(BaseModel):
    """Uniform 1D grid with both endpoints included: node i at x_min + i*(x_max-x_min)/(n-1)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    x_min: float
    x_max: float

    @model_validator(mode="after")
    def check_bounds(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min ({self.x_min}) must be below x_max ({self.x_max})")
        return self

    @property
    def ndim(self) -> int:
        return 1

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def size(self) -> int:
        return self.n

    @property
    def shape(self) -> Tuple[int]:
        return (self.n,)

    def nodes(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.spacing

    def bounds(self) -> Tuple[Tuple[float, float]]:
        return ((self.x_min, self.x_max),)


class Grid2D(BaseModel):
    """
    Periodic square grid on [-L, L)^2.

    Node i sits at -L + i*2L/n on each axis; values[i, j] = f(x_i, y_j).
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=8)
    half_width: float = Field(..., gt=0)

    @model_validator(mode="after")
    def check_even(self):
        if self.n % 2:
            raise ValueError(f"Grid2D needs an even node count for spectral transforms, got {self.n}")
        return self

    @property
    def ndim(self) -> int:
        return 2

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def size(self) -> int:
        return self.n * self.n

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n, self.n)

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    def nodes(self) -> np.ndarray:
        return -self.half_width + np.arange(self.n) * self.spacing

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        axis = self.nodes()
        return np.meshgrid(axis, axis, indexing="ij")

    def bounds(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        upper = self.half_width - self.spacing
        return ((-self.half_width, upper), (-self.half_width, upper))

    def wavenumbers(self) -> Tuple[np.ndarray, np.ndarray]:
        """Angular wavenumbers (kx, ky) laid out for rfft2 of an ij-indexed field."""
        kx = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.spacing)
        ky = 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.spacing)
        return np.meshgrid(kx, ky, indexing="ij")


Grid = Union[Grid1D, Grid2D]


class Window(BaseModel):
    """Self-similar window D_C = {|xi| <= C} (I_C in 1D)."""

    model_config = ConfigDict(frozen=True)

    C: float = Field(..., gt=0)
    dim: int = Field(2, ge=1, le=2)

    def physical_radius(self, t: float) -> float:
        """Radius of the expanding image D_{t,C}."""
        return self.C * float(np.sqrt(t + 1.0))

    def contains(self, xi) -> np.ndarray:
        """
        Membership of points of shape (dim,) or (N, dim); a 1D window also takes (N,).

        A single point gives a scalar bool.
        """
        xi = np.asarray(xi, dtype=float)
        if self.dim == 1 and (xi.ndim == 0 or xi.shape[-1] != 1):
            return np.abs(xi) <= self.C
        if xi.ndim == 0 or xi.shape[-1] != self.dim:
            raise DomainError(f"Window of dim {self.dim} got points of shape {xi.shape}")
        return np.linalg.norm(xi, axis=-1) <= self.C

    def contains_physical(self, x, t: float) -> np.ndarray:
        """Membership of physical points in D_{t,C}."""
        return self.contains(np.asarray(x, dtype=float) / np.sqrt(t + 1.0))
