# src/ssvlab/services/solvers/burgers.py
"""
Viscous Burgers references, u_t + (u^2/2)_x = u_xx, for the bipolar box
u0 = 1 on (-1, 0), -1 on (0, 1).

The Cole-Hopf substitution u = -2 (log phi)_x turns the problem into heat flow
of phi0 = exp(-(1/2) int u0), which is piecewise exponential; its heat evolution
is a finite sum of erfc and exponential terms.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.special import erf, erfc

from ssvlab.core.errors import DomainError, NumericalAbort
from ssvlab.core.grids import Grid1D
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot
from ssvlab.schemas.solver import Burgers1dConfig, BurgersScheme
from ssvlab.services.profiles import bipolar_box_antiderivative, burgers_initial_bipolar_box

logger = logging.getLogger(__name__)

PHI_FLOOR = 1e-300
GROWTH_LIMIT = 10.0


def _half_erf_difference(b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """(erf(b) - erf(a)) / 2 without cancellation in the tails."""
    both_positive = (a >= 0) & (b >= 0)
    both_negative = (a <= 0) & (b <= 0)
    out = 0.5 * (erf(b) - erf(a))
    out = np.where(both_positive, 0.5 * (erfc(a) - erfc(b)), out)
    out = np.where(both_negative, 0.5 * (erfc(-b) - erfc(-a)), out)
    return out


def _cole_hopf_terms(x: np.ndarray, t: np.ndarray):
    """phi and -phi_x/2 pieces of the heat evolution; returns (phi, I_left, I_right)."""
    s = 2.0 * np.sqrt(t)
    outer = 0.5 * erfc((x + 1.0) / s) + 0.5 * erfc((1.0 - x) / s)
    # phi0 = exp(-(x+1)/2) on (-1, 0) and exp(-(1-x)/2) on (0, 1)
    left = np.exp(-0.5 - 0.5 * x + 0.25 * t) * _half_erf_difference((t - x) / s, (t - 1.0 - x) / s)
    right = np.exp(-0.5 + 0.5 * x + 0.25 * t) * _half_erf_difference((1.0 - x - t) / s, (-x - t) / s)
    return outer + left + right, left, right


def solve_burgers_cole_hopf(x, t):
    """
    Exact solution for the bipolar box at points x and times t > 0 (broadcast).

    At t = 0 the initial data is returned directly.

    :raises: DomainError for t < 0, NumericalAbort if phi underflows
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("Cole-Hopf evaluation needs finite t >= 0")
    x, t = np.broadcast_arrays(x, t)
    out = np.empty(x.shape)
    initial = t == 0
    out[initial] = burgers_initial_bipolar_box(x[initial])
    live = ~initial
    if np.any(live):
        phi, left, right = _cole_hopf_terms(x[live], t[live])
        if np.any(phi < PHI_FLOOR) or not np.all(np.isfinite(phi)):
            worst = float(np.min(phi))
            logger.error(f"Cole-Hopf denominator underflow (min phi={worst:.3e})")
            raise NumericalAbort(
                "Cole-Hopf denominator below 1e-300",
                diagnostic={"min_phi": worst},
            )
        out[live] = (left - right) / phi
    if out.ndim == 0:
        return float(out)
    return out


def sample_cole_hopf_series(grid: Grid1D, t_end: float = 5.0, output_every: float = 0.01) -> FieldSeries:
    """Cole-Hopf solution on the grid nodes at the solver output cadence."""
    count = int(round(t_end / output_every)) + 1
    times = output_every * np.arange(count)
    x = grid.nodes()
    values = solve_burgers_cole_hopf(x[None, :], times[:, None])
    logger.info(f"Cole-Hopf series: n={grid.n}, {count} snapshots up to t={times[-1]:.3f}")
    return FieldSeries(grid=grid, times=times, values=values)


def project_cell_averages(antiderivative: Callable, grid: Grid1D) -> np.ndarray:
    """
    Cell averages over [x_i - dx/2, x_i + dx/2] from an antiderivative F.

    Sampling discontinuous data this way keeps the FD scheme second order.
    """
    x = grid.nodes()
    h = grid.spacing
    return (np.asarray(antiderivative(x + 0.5 * h)) - np.asarray(antiderivative(x - 0.5 * h))) / h


def bipolar_box_snapshot(grid: Grid1D) -> ScalarFieldSnapshot:
    return ScalarFieldSnapshot(grid=grid, t=0.0, values=project_cell_averages(bipolar_box_antiderivative, grid))


def _rhs(u: np.ndarray, inv_h: float, inv_h2: float) -> np.ndarray:
    """Interior tendency u_xx - (u^2/2)_x; Dirichlet ends stay put."""
    du = np.zeros_like(u)
    flux = 0.5 * u * u
    du[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) * inv_h2 - (flux[2:] - flux[:-2]) * (0.5 * inv_h)
    return du


def solve_burgers_fd(u0: ScalarFieldSnapshot, cfg: Optional[Burgers1dConfig] = None) -> FieldSeries:
    """
    Central differences in space, classical RK4 in time, zero Dirichlet ends.

    :param u0: Initial data on cfg.grid (end values are forced to zero)
    :param cfg: Solver settings; the scheme tag is not consulted here
    :return: Series at the configured cadence
    :raises: NumericalAbort if max|u| grows past 10x its initial value or turns non-finite
    """
    cfg = cfg or Burgers1dConfig()
    if u0.grid != cfg.grid:
        raise DomainError(f"Initial data grid {u0.grid} does not match solver grid {cfg.grid}")

    h = cfg.grid.spacing
    inv_h, inv_h2 = 1.0 / h, 1.0 / (h * h)
    dt = cfg.dt
    per_output = cfg.steps_per_output
    count = cfg.output_count
    times = u0.t + cfg.output_every * np.arange(count)

    u = np.array(u0.values, dtype=np.float64)
    u[0] = u[-1] = 0.0
    peak0 = float(np.max(np.abs(u)))
    ceiling = GROWTH_LIMIT * peak0
    values = np.empty((count, cfg.grid.n))
    values[0] = u
    warned = False

    logger.info(f"Burgers FD solve: n={cfg.grid.n}, dx={h:.4e}, dt={dt}, t_end={cfg.t_end}")
    step = 0
    for k in range(1, count):
        for _ in range(per_output):
            k1 = _rhs(u, inv_h, inv_h2)
            k2 = _rhs(u + 0.5 * dt * k1, inv_h, inv_h2)
            k3 = _rhs(u + 0.5 * dt * k2, inv_h, inv_h2)
            k4 = _rhs(u + dt * k3, inv_h, inv_h2)
            u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            step += 1
        peak = float(np.max(np.abs(u)))
        if not np.isfinite(peak) or peak > ceiling:
            logger.error(f"Burgers FD unstable at t={times[k]:.4f}: max|u|={peak:.3e}")
            raise NumericalAbort(
                f"Burgers FD instability at t={times[k]:.4f}",
                diagnostic={"t": float(times[k]), "step": step, "max_abs_u": peak, "initial_max": peak0, "dt": dt},
            )
        edge = max(abs(u[1]), abs(u[-2]))
        if edge > cfg.boundary_tolerance and not warned:
            logger.warning(f"Burgers FD: |u| near the box ends reached {edge:.2e} at t={times[k]:.3f}")
            warned = True
        values[k] = u

    return FieldSeries(grid=cfg.grid, times=times, values=values)


def solve_burgers_reference(cfg: Optional[Burgers1dConfig] = None) -> FieldSeries:
    """Reference series for the bipolar box with the configured scheme."""
    cfg = cfg or Burgers1dConfig()
    if cfg.scheme == BurgersScheme.COLE_HOPF_EXACT:
        return sample_cole_hopf_series(cfg.grid, cfg.t_end, cfg.output_every)
    return solve_burgers_fd(bipolar_box_snapshot(cfg.grid), cfg)
