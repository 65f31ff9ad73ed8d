# src/ssvlab/services/solvers/ns2d.py
"""
Pseudo-spectral vorticity solver for 2D Navier-Stokes (nu = 1) on a periodic box.

    d_t omega + u . grad omega = Delta omega,   u = K * omega

Diffusion is integrated exactly by an integrating factor; the advection term
is advanced with classical RK4 and dealiased by the 2/3 rule.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ssvlab.core.errors import DomainError, NumericalAbort
from ssvlab.core.grids import Grid2D
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot
from ssvlab.schemas.solver import Integrator, Ns2dConfig

logger = logging.getLogger(__name__)

# Initial data must have decayed below this on the outer ring of the box
BOUNDARY_DECAY = 1e-10


class SpectralOperators:
    """Wavenumber arrays of one grid, in rfft2 layout."""

    def __init__(self, grid: Grid2D, dealias: bool = True):
        self.grid = grid
        kx, ky = grid.wavenumbers()
        self.k2 = kx * kx + ky * ky
        self.inv_k2 = np.zeros_like(self.k2)
        nonzero = self.k2 > 0
        self.inv_k2[nonzero] = 1.0 / self.k2[nonzero]

        # Derivatives drop the unpaired Nyquist modes so results stay real
        nyquist = np.pi / grid.spacing
        self.dx = 1j * np.where(np.isclose(np.abs(kx), nyquist), 0.0, kx)
        self.dy = 1j * np.where(np.isclose(np.abs(ky), nyquist), 0.0, ky)

        if dealias:
            cutoff = (2.0 / 3.0) * nyquist
            self.mask = ((np.abs(kx) < cutoff) & (np.abs(ky) < cutoff)).astype(np.float64)
        else:
            self.mask = np.ones_like(self.k2)

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.rfft2(values)

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        n = self.grid.n
        return np.fft.irfft2(coeffs, s=(n, n))

    def velocity_hat(self, omega_hat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """u_hat = i k_perp omega_hat / |k|^2 with the zero mode removed."""
        u1_hat = self.dy * omega_hat * self.inv_k2
        u2_hat = -self.dx * omega_hat * self.inv_k2
        return u1_hat, u2_hat


def _solid_rotation(grid: Grid2D, circulation: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Velocity of the uniform background vorticity the periodic inversion subtracts.

    The periodic field has zero mean, i.e. it carries -Gamma/A of uniform vorticity;
    adding Gamma/(2A) x_perp restores the whole-plane far field near the origin.
    """
    x, y = grid.mesh()
    area = (2.0 * grid.half_width) ** 2
    factor = circulation / (2.0 * area)
    return -factor * y, factor * x


def _velocity(ops: SpectralOperators, omega_hat: np.ndarray, whole_plane: bool) -> Tuple[np.ndarray, np.ndarray]:
    u1_hat, u2_hat = ops.velocity_hat(omega_hat)
    u1 = ops.inverse(u1_hat)
    u2 = ops.inverse(u2_hat)
    if whole_plane:
        circulation = float(omega_hat[0, 0].real) * ops.grid.cell_area
        c1, c2 = _solid_rotation(ops.grid, circulation)
        u1 = u1 + c1
        u2 = u2 + c2
    return u1, u2


def biot_savart(
    omega: ScalarFieldSnapshot,
    whole_plane: bool = False,
) -> Tuple[ScalarFieldSnapshot, ScalarFieldSnapshot]:
    """
    Recover the velocity of a vorticity field by spectral inversion.

    :param omega: Vorticity on a periodic Grid2D
    :param whole_plane: Add the solid-body term lost with the zero mode
    :return: (u1, u2) snapshots at the same time
    :raises: DomainError for non-periodic grids
    """
    if not isinstance(omega.grid, Grid2D):
        raise DomainError("biot_savart needs a square periodic Grid2D")
    ops = SpectralOperators(omega.grid, dealias=False)
    u1, u2 = _velocity(ops, ops.forward(omega.values), whole_plane)
    return (
        ScalarFieldSnapshot(grid=omega.grid, t=omega.t, values=u1),
        ScalarFieldSnapshot(grid=omega.grid, t=omega.t, values=u2),
    )


def spectral_divergence(u1: ScalarFieldSnapshot, u2: ScalarFieldSnapshot) -> float:
    """Max-norm of div u computed in Fourier space."""
    ops = SpectralOperators(u1.grid, dealias=False)
    div_hat = ops.dx * ops.forward(u1.values) + ops.dy * ops.forward(u2.values)
    return float(np.max(np.abs(ops.inverse(div_hat))))


class Ns2dSolver:
    """Integrating-factor RK4 stepper bound to one config."""

    def __init__(self, cfg: Ns2dConfig):
        self.cfg = cfg
        self.grid = cfg.grid
        self.ops = SpectralOperators(cfg.grid, dealias=cfg.dealias)
        self.e_full = np.exp(-self.ops.k2 * cfg.dt)
        self.e_half = np.exp(-self.ops.k2 * cfg.dt / 2.0)
        self.advance = {Integrator.RK4_INTEGRATING_FACTOR: self.step}[cfg.integrator]

    def nonlinear(self, omega_hat: np.ndarray) -> np.ndarray:
        """-FFT(u . grad omega), dealiased, zero mode pinned to 0."""
        if not self.cfg.advection:
            return np.zeros_like(omega_hat)
        ops = self.ops
        u1, u2 = _velocity(ops, omega_hat, self.cfg.whole_plane_correction)
        omega_x = ops.inverse(ops.dx * omega_hat)
        omega_y = ops.inverse(ops.dy * omega_hat)
        n_hat = -ops.forward(u1 * omega_x + u2 * omega_y) * ops.mask
        n_hat[0, 0] = 0.0
        return n_hat

    def step(self, omega_hat: np.ndarray) -> np.ndarray:
        dt = self.cfg.dt
        E, Eh = self.e_full, self.e_half
        k1 = self.nonlinear(omega_hat)
        k2 = self.nonlinear(Eh * (omega_hat + 0.5 * dt * k1))
        k3 = self.nonlinear(Eh * omega_hat + 0.5 * dt * k2)
        k4 = self.nonlinear(E * omega_hat + dt * Eh * k3)
        return E * omega_hat + (dt / 6.0) * (E * k1 + 2.0 * Eh * (k2 + k3) + k4)

    def cfl_number(self, omega_hat: np.ndarray) -> float:
        if not self.cfg.advection:
            return 0.0
        u1, u2 = _velocity(self.ops, omega_hat, self.cfg.whole_plane_correction)
        speed = float(np.max(np.hypot(u1, u2)))
        return self.cfg.dt * speed / self.grid.spacing

    def check(self, omega: np.ndarray, omega_hat: np.ndarray, t: float, step: int) -> None:
        if not np.all(np.isfinite(omega)):
            logger.error(f"NaN/Inf in vorticity at t={t:.4f} (step {step})")
            raise NumericalAbort(
                f"Non-finite vorticity at t={t:.4f}",
                diagnostic={"t": t, "step": step, "dt": self.cfg.dt, "n": self.grid.n},
            )
        cfl = self.cfl_number(omega_hat)
        if cfl > self.cfg.cfl_limit:
            logger.error(f"CFL number {cfl:.3f} exceeds {self.cfg.cfl_limit} at t={t:.4f}")
            raise NumericalAbort(
                f"CFL violation ({cfl:.3f} > {self.cfg.cfl_limit}) at t={t:.4f}",
                diagnostic={"t": t, "step": step, "cfl": cfl, "dt": self.cfg.dt, "n": self.grid.n},
            )


def _check_boundary_decay(omega0: ScalarFieldSnapshot) -> None:
    v = omega0.values
    ring = np.concatenate([v[0, :], v[-1, :], v[:, 0], v[:, -1]])
    peak = float(np.max(np.abs(ring)))
    if peak >= BOUNDARY_DECAY:
        raise DomainError(
            f"Initial vorticity has not decayed at the box boundary (max {peak:.3e} >= {BOUNDARY_DECAY:.0e}); "
            f"enlarge half_width"
        )


def solve_ns2d(
    omega0: ScalarFieldSnapshot,
    cfg: Optional[Ns2dConfig] = None,
) -> FieldSeries:
    """
    Evolve vorticity from omega0 and store snapshots every cfg.output_every.

    :param omega0: Initial vorticity on cfg.grid
    :param cfg: Solver settings; defaults to Ns2dConfig()
    :return: Series with cfg.output_count snapshots starting at omega0.t
    :raises: DomainError for a grid mismatch or undecayed data, NumericalAbort on NaN/CFL
    """
    cfg = cfg or Ns2dConfig()
    if omega0.grid != cfg.grid:
        raise DomainError(f"Initial data grid {omega0.grid} does not match solver grid {cfg.grid}")
    _check_boundary_decay(omega0)

    solver = Ns2dSolver(cfg)
    ops = solver.ops
    per_output = cfg.steps_per_output
    count = cfg.output_count
    times = omega0.t + cfg.output_every * np.arange(count)
    values = np.empty((count,) + cfg.grid.shape)
    values[0] = omega0.values

    omega_hat = ops.forward(omega0.values)
    solver.check(omega0.values, omega_hat, omega0.t, 0)
    logger.info(
        f"NS solve ({cfg.integrator.value}): n={cfg.grid.n}, L={cfg.grid.half_width}, dt={cfg.dt}, "
        f"t_end={cfg.t_end}, {count} snapshots"
    )

    report_every = max(1, (count - 1) // 10)
    step = 0
    for k in range(1, count):
        for _ in range(per_output):
            omega_hat = solver.advance(omega_hat)
            step += 1
        omega = ops.inverse(omega_hat)
        solver.check(omega, omega_hat, float(times[k]), step)
        values[k] = omega
        if k % report_every == 0:
            logger.info(f"NS solve t={times[k]:.3f} max|omega|={np.max(np.abs(omega)):.4e}")

    return FieldSeries(grid=cfg.grid, times=times, values=values)
