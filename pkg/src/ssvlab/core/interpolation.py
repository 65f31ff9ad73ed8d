# src/ssvlab/core/interpolation.py

from typing import Tuple

import numpy as np

from ssvlab.core.errors import DomainError
from ssvlab.core.grids import Grid1D, Grid2D
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot

# Slack for points produced by exact-in-theory coordinate maps
_BOUND_TOL = 1e-12


def _cell_coordinates(axis_min: float, spacing: float, n: int, coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Left node index and fractional offset along one axis; last cell absorbs the upper node."""
    s = (coords - axis_min) / spacing
    i0 = np.clip(np.floor(s).astype(np.int64), 0, n - 2)
    return i0, s - i0


def _check_inside(grid: Grid1D | Grid2D, points: np.ndarray) -> None:
    for axis, (lo, hi) in enumerate(grid.bounds()):
        coords = points[:, axis]
        tol = _BOUND_TOL * max(1.0, hi - lo)
        if coords.size and (coords.min() < lo - tol or coords.max() > hi + tol or not np.all(np.isfinite(coords))):
            raise DomainError(
                f"Point outside grid box on axis {axis}: range [{coords.min():.6g}, {coords.max():.6g}] "
                f"vs [{lo:.6g}, {hi:.6g}]"
            )


def _as_points(grid: Grid1D | Grid2D, points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if grid.ndim == 1:
        return pts.reshape(-1, 1)
    return pts.reshape(-1, 2)


def _stencil(grid: Grid1D | Grid2D, pts: np.ndarray):
    if grid.ndim == 1:
        i0, fx = _cell_coordinates(grid.x_min, grid.spacing, grid.n, pts[:, 0])
        return (i0,), (fx,)
    lo = -grid.half_width
    i0, fx = _cell_coordinates(lo, grid.spacing, grid.n, pts[:, 0])
    j0, fy = _cell_coordinates(lo, grid.spacing, grid.n, pts[:, 1])
    return (i0, j0), (fx, fy)


def sample_points(grid: Grid1D | Grid2D, values: np.ndarray, points) -> np.ndarray:
    """
    Linear (1D) / bilinear (2D) interpolation of a gridded field at many points.

    :param grid: Grid of the field
    :param values: Field values shaped like the grid
    :param points: (N,) for 1D or (N, 2) for 2D
    :return: Interpolated values, shape (N,)
    :raises: DomainError for points outside the grid box
    """
    pts = _as_points(grid, points)
    _check_inside(grid, pts)
    v = np.asarray(values, dtype=np.float64).reshape(grid.shape)
    index, frac = _stencil(grid, pts)
    if grid.ndim == 1:
        (i0,), (fx,) = index, frac
        return (1.0 - fx) * v[i0] + fx * v[i0 + 1]
    (i0, j0), (fx, fy) = index, frac
    return (
        (1.0 - fx) * (1.0 - fy) * v[i0, j0]
        + fx * (1.0 - fy) * v[i0 + 1, j0]
        + (1.0 - fx) * fy * v[i0, j0 + 1]
        + fx * fy * v[i0 + 1, j0 + 1]
    )


def bilinear_sample(snapshot: ScalarFieldSnapshot, p) -> float:
    """Interpolate one snapshot at one point; exact at grid nodes, never extrapolates."""
    return float(sample_points(snapshot.grid, snapshot.values, p)[0])


def _bracket(series: FieldSeries, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = series.t_first, series.t_last
    tol = _BOUND_TOL * max(1.0, abs(hi))
    if times.size and (times.min() < lo - tol or times.max() > hi + tol or not np.all(np.isfinite(times))):
        raise DomainError(f"Time outside stored range [{lo}, {hi}]: [{times.min()}, {times.max()}]")
    if len(series) == 1:
        return np.zeros(times.shape, dtype=np.int64), np.zeros(times.shape)
    k = np.clip(np.searchsorted(series.times, times, side="right") - 1, 0, len(series) - 2)
    dt = series.times[k + 1] - series.times[k]
    w = np.clip((times - series.times[k]) / dt, 0.0, 1.0)
    return k, w


def temporal_interpolate(series: FieldSeries, t: float) -> ScalarFieldSnapshot:
    """
    Linear interpolation in time between the bracketing snapshots.

    :raises: DomainError if t lies outside the stored range
    """
    k, w = _bracket(series, np.array([float(t)]))
    k0, w0 = int(k[0]), float(w[0])
    if len(series) == 1 or w0 == 0.0:
        values = series.values[k0]
    elif w0 == 1.0:
        values = series.values[k0 + 1]
    else:
        values = (1.0 - w0) * series.values[k0] + w0 * series.values[k0 + 1]
    return ScalarFieldSnapshot(grid=series.grid, t=float(t), values=values)


def sample_space_time(series: FieldSeries, points, times) -> np.ndarray:
    """
    Space-time interpolation of a series at paired (point, time) samples.

    :param series: Reference series
    :param points: (N,) or (N, 2) spatial points
    :param times: (N,) physical times
    :return: Values, shape (N,)
    """
    grid = series.grid
    pts = _as_points(grid, points)
    ts = np.asarray(times, dtype=np.float64).reshape(-1)
    if ts.size != pts.shape[0]:
        raise DomainError(f"Got {pts.shape[0]} points but {ts.size} times")
    _check_inside(grid, pts)
    k, w = _bracket(series, ts)
    k1 = np.minimum(k + 1, len(series) - 1)
    index, frac = _stencil(grid, pts)
    v = series.values

    def at(kk):
        if grid.ndim == 1:
            (i0,), (fx,) = index, frac
            return (1.0 - fx) * v[kk, i0] + fx * v[kk, i0 + 1]
        (i0, j0), (fx, fy) = index, frac
        return (
            (1.0 - fx) * (1.0 - fy) * v[kk, i0, j0]
            + fx * (1.0 - fy) * v[kk, i0 + 1, j0]
            + (1.0 - fx) * fy * v[kk, i0, j0 + 1]
            + fx * fy * v[kk, i0 + 1, j0 + 1]
        )

    return (1.0 - w) * at(k) + w * at(k1)
