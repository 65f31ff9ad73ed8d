# src/ssvlab/services/transforms.py
"""
Change of variables between physical (x, t) and self-similar (xi, tau) coordinates:

    xi = x / sqrt(t + 1),   tau = log(t + 1)

Amplitudes: NS vorticity omega = (t+1)^-1 Omega, Burgers u = (t+1)^-1/2 w.
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ssvlab.core.errors import DomainError
from ssvlab.schemas.experiment import SystemTag


def _as_tuple(v):
    if np.isscalar(v):
        return (float(v),)
    return tuple(float(c) for c in v)


class PhysCoord(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: Tuple[float, ...]
    t: float = Field(..., ge=0)

    @field_validator("x", mode="before")
    @classmethod
    def coerce_x(cls, v):
        return _as_tuple(v)


class SsvCoord(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: Tuple[float, ...]
    tau: float = Field(..., ge=0)

    @field_validator("xi", mode="before")
    @classmethod
    def coerce_xi(cls, v):
        return _as_tuple(v)


def _check_times(t: np.ndarray) -> None:
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("Physical time must be finite and >= 0")


def _check_taus(tau: np.ndarray) -> None:
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise DomainError("Self-similar time must be finite and >= 0")


def phys_to_ssv_arrays(x, t) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized forward map.

    :param x: (N,) or (N, d) positions
    :param t: (N,) times
    :return: (xi with the shape of x, tau of shape (N,))
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    _check_times(t)
    scale = np.sqrt(t + 1.0)
    if x.ndim == 2:
        scale = scale[:, None]
    return x / scale, np.log1p(t)


def ssv_to_phys_arrays(xi, tau) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized inverse map: t = e^tau - 1, x = sqrt(t+1) xi."""
    xi = np.asarray(xi, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    _check_taus(tau)
    t = np.expm1(tau)
    scale = np.exp(0.5 * tau)
    if xi.ndim == 2:
        scale = scale[:, None]
    return xi * scale, t


def phys_to_ssv(p: PhysCoord) -> SsvCoord:
    xi, tau = phys_to_ssv_arrays(np.array(p.x), np.array(p.t))
    return SsvCoord(xi=xi, tau=float(tau))


def ssv_to_phys(s: SsvCoord) -> PhysCoord:
    x, t = ssv_to_phys_arrays(np.array(s.xi), np.array(s.tau))
    return PhysCoord(x=x, t=float(t))


def ssv_window_radius(C: float, t) -> np.ndarray:
    """Radius C*sqrt(t+1) of D_{t,C} / I_{t,C}."""
    return C * np.sqrt(np.asarray(t, dtype=np.float64) + 1.0)


def ns_amp_phys_to_ssv(omega, t):
    """Omega = (t+1) * omega."""
    t = np.asarray(t, dtype=np.float64)
    _check_times(t)
    return (t + 1.0) * omega


def ns_amp_ssv_to_phys(Omega, tau):
    """omega = e^-tau * Omega."""
    tau = np.asarray(tau, dtype=np.float64)
    _check_taus(tau)
    return np.exp(-tau) * Omega


def burgers_amp_phys_to_ssv(u, t):
    """w = sqrt(t+1) * u."""
    t = np.asarray(t, dtype=np.float64)
    _check_times(t)
    return np.sqrt(t + 1.0) * u


def burgers_amp_ssv_to_phys(w, tau):
    """u = e^(-tau/2) * w."""
    tau = np.asarray(tau, dtype=np.float64)
    _check_taus(tau)
    return np.exp(-0.5 * tau) * w


def map_ssv_prediction_to_physical(system: SystemTag, ssv_values, t):
    """
    Pull an SSV-head output at (x/sqrt(t+1), log(t+1)) back to a physical field value.

    :param system: ns2d (factor (t+1)^-1) or burgers (factor (t+1)^-1/2)
    :param ssv_values: Model output in self-similar amplitude
    :param t: Physical time(s), >= 0
    """
    t = np.asarray(t, dtype=np.float64)
    _check_times(t)
    if system == SystemTag.NS2D:
        return np.asarray(ssv_values) / (t + 1.0)
    return np.asarray(ssv_values) / np.sqrt(t + 1.0)
