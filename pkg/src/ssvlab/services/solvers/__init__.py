"""Reference solvers: spectral 2D Navier-Stokes and viscous Burgers."""

from .burgers import (
    bipolar_box_snapshot,
    project_cell_averages,
    sample_cole_hopf_series,
    solve_burgers_cole_hopf,
    solve_burgers_fd,
    solve_burgers_reference,
)
from .ns2d import biot_savart, solve_ns2d, spectral_divergence

__all__ = [
    "bipolar_box_snapshot",
    "project_cell_averages",
    "sample_cole_hopf_series",
    "solve_burgers_cole_hopf",
    "solve_burgers_fd",
    "solve_burgers_reference",
    "biot_savart",
    "solve_ns2d",
    "spectral_divergence",
]
