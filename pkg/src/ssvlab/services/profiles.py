# src/ssvlab/services/profiles.py
"""Analytic fields: initial data, exact solutions and long-time profiles."""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.special import erfc

from ssvlab.core.errors import DomainError

logger = logging.getLogger(__name__)

INV_4PI = 1.0 / (4.0 * np.pi)
INV_SQRT_PI = 1.0 / np.sqrt(np.pi)


class TwoGaussianParams(BaseModel):
    """omega0 = A1 exp(-|x-c1|^2/s1^2) + A2 exp(-|x-c2|^2/s2^2); defaults give a non-radial pair."""

    model_config = ConfigDict(frozen=True)

    A1: float = 1.0
    A2: float = 0.6
    x1: float = -1.5
    y1: float = 0.5
    x2: float = 1.0
    y2: float = -0.8
    sigma1: float = Field(1.0, gt=0)
    sigma2: float = Field(1.3, gt=0)


class DiffusionWaveParams(BaseModel):
    """Mass of the Burgers diffusion wave; profile() evaluates G_M."""

    model_config = ConfigDict(frozen=True)

    M: float

    @field_validator("M")
    @classmethod
    def check_finite(cls, v):
        if not np.isfinite(v):
            raise ValueError(f"Diffusion wave mass must be finite, got {v}")
        return v

    @property
    def c(self) -> float:
        """c = 1 - exp(-M/2)."""
        return float(-np.expm1(-0.5 * self.M))

    def profile(self, xi):
        """
        Self-similar Burgers profile of mass M:

            G_M(xi) = c exp(-xi^2/4) / (sqrt(pi) [1 - c erfc(-xi/2)/2])

        :raises: DomainError if the denominator is not positive
        """
        xi = np.asarray(xi, dtype=np.float64)
        c = self.c
        denominator = 1.0 - c * 0.5 * erfc(-0.5 * xi)
        if np.any(denominator <= 0) or not np.all(np.isfinite(denominator)):
            logger.error(f"Diffusion wave denominator not positive for M={self.M}")
            raise DomainError(f"Diffusion wave denominator vanishes for M={self.M}")
        return c * np.exp(-0.25 * xi * xi) * INV_SQRT_PI / denominator


def _points2(xi) -> np.ndarray:
    return np.asarray(xi, dtype=np.float64)


def _radius_sq(xi: np.ndarray) -> np.ndarray:
    return np.sum(xi * xi, axis=-1)


def oseen_vortex(xi):
    """G(xi) = exp(-|xi|^2/4) / (4 pi); xi of shape (2,) or (N, 2)."""
    xi = _points2(xi)
    return INV_4PI * np.exp(-0.25 * _radius_sq(xi))


def oseen_gradient(xi) -> np.ndarray:
    """grad G = -(xi/2) G."""
    xi = _points2(xi)
    return -0.5 * xi * oseen_vortex(xi)[..., None]


def oseen_laplacian(xi):
    """Delta G = (|xi|^2/4 - 1) G."""
    xi = _points2(xi)
    return (0.25 * _radius_sq(xi) - 1.0) * oseen_vortex(xi)


def ssv_operator_residual(xi):
    """(Delta + xi.grad/2 + Id) G with analytic derivatives."""
    xi = _points2(xi)
    advect = 0.5 * np.sum(xi * oseen_gradient(xi), axis=-1)
    return oseen_laplacian(xi) + advect + oseen_vortex(xi)


def ssv_operator_residual_fd(xi, h: float):
    """Same operator with second-order central differences of spacing h."""
    xi = _points2(xi)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    g0 = oseen_vortex(xi)
    gxp, gxm = oseen_vortex(xi + ex), oseen_vortex(xi - ex)
    gyp, gym = oseen_vortex(xi + ey), oseen_vortex(xi - ey)
    lap = (gxp + gxm + gyp + gym - 4.0 * g0) / (h * h)
    dx = (gxp - gxm) / (2.0 * h)
    dy = (gyp - gym) / (2.0 * h)
    return lap + 0.5 * (xi[..., 0] * dx + xi[..., 1] * dy) + g0


def oseen_velocity(xi) -> np.ndarray:
    """
    Velocity of the Oseen vortex, U(xi) = xi_perp / (2 pi |xi|^2) * (1 - exp(-|xi|^2/4)).

    The singularity at the origin is removable; U(0) = 0.
    """
    xi = _points2(xi)
    r2 = _radius_sq(xi)
    perp = np.stack([-xi[..., 1], xi[..., 0]], axis=-1)
    safe = np.where(r2 > 0, r2, 1.0)
    factor = np.where(r2 > 0, -np.expm1(-0.25 * r2) / (2.0 * np.pi * safe), 0.0)
    return perp * factor[..., None]


def diffusion_wave(xi, M: float):
    """G_M(xi) for a bare mass; see DiffusionWaveParams.profile."""
    return DiffusionWaveParams(M=M).profile(xi)


def ns_initial_two_gaussians(x, y, params: TwoGaussianParams = TwoGaussianParams()):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    first = params.A1 * np.exp(-((x - params.x1) ** 2 + (y - params.y1) ** 2) / params.sigma1 ** 2)
    second = params.A2 * np.exp(-((x - params.x2) ** 2 + (y - params.y2) ** 2) / params.sigma2 ** 2)
    return first + second


def total_mass_two_gaussians(params: TwoGaussianParams = TwoGaussianParams()) -> float:
    """Circulation pi (A1 s1^2 + A2 s2^2)."""
    return float(np.pi * (params.A1 * params.sigma1 ** 2 + params.A2 * params.sigma2 ** 2))


def burgers_initial_bipolar_box(x):
    """1 on (-1, 0), -1 on (0, 1), 0 elsewhere; 0 at the jump points."""
    x = np.asarray(x, dtype=np.float64)
    return np.where((x > -1.0) & (x < 0.0), 1.0, 0.0) - np.where((x > 0.0) & (x < 1.0), 1.0, 0.0)


def bipolar_box_antiderivative(x):
    """Integral of the bipolar box from -inf to x: a tent of height 1 on [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    return np.clip(1.0 - np.abs(x), 0.0, None)


def lamb_oseen_exact(x, t, alpha: float = 1.0):
    """omega(x, t) = alpha / (4 pi (t+1)) exp(-|x|^2 / (4 (t+1)))."""
    x = _points2(x)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0):
        raise DomainError("Lamb-Oseen time must be >= 0")
    s = t + 1.0
    return alpha * INV_4PI / s * np.exp(-_radius_sq(x) / (4.0 * s))


def heat_gaussian(x, t, amplitude: float = 1.0, sigma: float = 1.0):
    """Heat flow (nu = 1, 2D) of amplitude * exp(-|x|^2 / sigma^2)."""
    x = _points2(x)
    width = sigma ** 2 + 4.0 * np.asarray(t, dtype=np.float64)
    return amplitude * sigma ** 2 / width * np.exp(-_radius_sq(x) / width)
