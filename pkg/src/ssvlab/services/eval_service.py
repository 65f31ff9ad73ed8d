# src/ssvlab/services/eval_service.py
"""
Windowed error functionals, RelMSE extrapolation sweeps and figure snapshots.

All quadratures use the midpoint rule on `resolution` cells per axis over the
square [-R, R]^d, keeping only cells whose centre lies in the disk |x| <= R.
"""

import logging
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import maximum_filter

from ssvlab.core.errors import DomainError, NumericalAbort
from ssvlab.core.grids import Grid1D, Grid2D, Window
from ssvlab.core.interpolation import sample_points, temporal_interpolate
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot
from ssvlab.models.metrics import MetricSeries
from ssvlab.models.training import TrainedHead
from ssvlab.nn import evaluate
from ssvlab.schemas.experiment import EvalGridSpec, HeadTag
from ssvlab.services.profiles import DiffusionWaveParams, oseen_vortex
from ssvlab.services.transforms import map_ssv_prediction_to_physical, phys_to_ssv_arrays, ssv_window_radius
from ssvlab.utils.parallel import thread_map

logger = logging.getLogger(__name__)

# Points (N, d) -> values (N,)
FieldFn = Callable[[np.ndarray], np.ndarray]
# Physical points (N, d) and time t -> physical field values (N,)
Predictor = Callable[[np.ndarray, float], np.ndarray]
Field = Union[FieldFn, ScalarFieldSnapshot]

RELMSE_FLOOR = 1e-300


def window_points(radius: float, dim: int, resolution: int) -> Tuple[np.ndarray, float]:
    """
    Cell centres of the eval grid inside the ball |x| <= radius.

    :return: (points of shape (N, dim), cell volume)
    """
    if radius <= 0 or resolution < 1:
        raise DomainError(f"Eval grid needs radius > 0 and resolution >= 1, got {radius}, {resolution}")
    h = 2.0 * radius / resolution
    axis = -radius + (np.arange(resolution) + 0.5) * h
    if dim == 1:
        points = axis[:, None]
    elif dim == 2:
        X, Y = np.meshgrid(axis, axis, indexing="ij")
        points = np.column_stack([X.reshape(-1), Y.reshape(-1)])
    else:
        raise DomainError(f"Eval grids are 1D or 2D, got dim={dim}")
    inside = Window(C=radius, dim=dim).contains(points)
    return points[inside], h ** dim


def _field_fn(field: Field) -> FieldFn:
    if isinstance(field, ScalarFieldSnapshot):
        return lambda pts: sample_points(field.grid, field.values, pts)
    return field


def _field_dim(*fields: Field, default: int = 2) -> int:
    for field in fields:
        if isinstance(field, ScalarFieldSnapshot):
            return field.grid.ndim
    return default


def _values(fn: FieldFn, points: np.ndarray) -> np.ndarray:
    pts = points[:, 0] if points.shape[1] == 1 else points
    values = np.asarray(fn(pts), dtype=np.float64).reshape(-1)
    if values.size == 1 and points.shape[0] != 1:
        values = np.full(points.shape[0], float(values[0]))
    if not np.all(np.isfinite(values)):
        raise DomainError("Field values on the eval grid must be finite")
    return values


def _windowed_l2(prediction: Field, reference: Field, radius: float, dim: Optional[int], resolution: int) -> float:
    dim = dim or _field_dim(prediction, reference)
    points, volume = window_points(radius, dim, resolution)
    error = _values(_field_fn(prediction), points) - _values(_field_fn(reference), points)
    return float(np.sum(error * error) * volume)


def windowed_l2_ssv(
    prediction: Field,
    reference: Field,
    C: float,
    tau: float,
    dim: Optional[int] = None,
    resolution: int = 256,
) -> float:
    """
    Integral of |Omega_hat - Omega|^2 over D_C (I_C in 1D) at self-similar time tau.

    :param prediction: Field of xi (callable or snapshot on xi coordinates)
    :param reference: Field of xi
    :param C: Window radius
    :param tau: Self-similar time the fields belong to
    :param dim: Spatial dimension; inferred from snapshot fields, else 2
    :param resolution: Cells per axis
    :raises: DomainError on non-finite values
    """
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    return _windowed_l2(prediction, reference, C, dim, resolution)


def windowed_l2_phys(
    prediction: Field,
    reference: Field,
    C: float,
    t: float,
    dim: Optional[int] = None,
    resolution: int = 256,
) -> float:
    """Integral of |omega_hat - omega|^2 over the expanding window |x| <= C sqrt(t+1)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return _windowed_l2(prediction, reference, float(ssv_window_radius(C, t)), dim, resolution)


def head_predictor(head: TrainedHead) -> Predictor:
    """
    Physical-space predictor of a trained head.

    SSV heads are queried at (x/sqrt(t+1), log(t+1)) and mapped back by the amplitude factor.
    """

    def predict(points: np.ndarray, t: float) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        points = points.reshape(points.shape[0], -1)
        times = np.full(points.shape[0], float(t))
        if head.head == HeadTag.PHYS:
            return evaluate(head.params, np.column_stack([points, times]))
        xi, tau = phys_to_ssv_arrays(points, times)
        w = evaluate(head.params, np.column_stack([xi, tau]))
        return map_ssv_prediction_to_physical(head.system, w, t)

    return predict


def reference_predictor(reference: FieldSeries) -> Predictor:
    """The reference series itself, as a predictor (interpolated in space and time)."""

    def predict(points: np.ndarray, t: float) -> np.ndarray:
        snapshot = temporal_interpolate(reference, t)
        return sample_points(snapshot.grid, snapshot.values, points)

    return predict


def _as_predictor(predictor: Union[Predictor, TrainedHead]) -> Predictor:
    if isinstance(predictor, TrainedHead):
        return head_predictor(predictor)
    return predictor


def rel_mse(
    predictor: Union[Predictor, TrainedHead],
    reference: FieldSeries,
    t: float,
    spec: EvalGridSpec,
) -> float:
    """
    Mean of (omega_hat - omega)^2 over the masked eval grid of D_(t,C), divided by the mean of omega^2.

    :return: The ratio, or NaN when the reference mean square is below 1e-300
    :raises: DomainError if t lies outside the reference series
    """
    predict = _as_predictor(predictor)
    snapshot = temporal_interpolate(reference, t)
    points, _ = window_points(float(ssv_window_radius(spec.C, t)), snapshot.grid.ndim, spec.resolution)
    query = points[:, 0] if points.shape[1] == 1 else points
    truth = sample_points(snapshot.grid, snapshot.values, query)
    guess = np.asarray(predict(points, t), dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(guess)):
        raise DomainError(f"Prediction at t={t} has non-finite values")
    denominator = float(np.mean(truth * truth))
    if denominator < RELMSE_FLOOR:
        logger.warning(f"RelMSE undefined at t={t}: reference mean square {denominator:.3e}")
        return float("nan")
    return float(np.mean((guess - truth) ** 2) / denominator)


def extrapolation_sweep(
    head: Union[Predictor, TrainedHead],
    reference: FieldSeries,
    spec: EvalGridSpec,
    label: str = "",
    threads: Optional[int] = None,
) -> MetricSeries:
    """
    RelMSE at every time of spec, evaluated in parallel and merged in time order.

    :raises: DomainError for times outside the reference, NumericalAbort if RelMSE is undefined
    """
    predict = _as_predictor(head)
    times = sorted(float(t) for t in spec.times)
    if not times:
        raise DomainError("Extrapolation sweep needs at least one evaluation time")
    values = thread_map(lambda t: rel_mse(predict, reference, t, spec), times, threads=threads)
    undefined = [t for t, v in zip(times, values) if not np.isfinite(v)]
    if undefined:
        raise NumericalAbort(
            f"RelMSE undefined at {len(undefined)} sweep time(s)",
            diagnostic={"times": undefined, "label": label},
        )
    logger.info(f"Sweep {label}: {len(times)} times, RelMSE in [{min(values):.3e}, {max(values):.3e}]")
    return MetricSeries(label=label, times=np.array(times), values=np.array(values))


def triptych_half_width(spec: EvalGridSpec, t: float) -> float:
    """One spatial extent for every panel: the window at the latest evaluation time."""
    latest = max([t] + list(spec.times))
    return float(ssv_window_radius(spec.C, latest))


def snapshot_triptych(
    heads: Tuple[Union[Predictor, TrainedHead], Union[Predictor, TrainedHead]],
    reference: FieldSeries,
    t: float,
    spec: EvalGridSpec,
) -> Tuple[ScalarFieldSnapshot, ScalarFieldSnapshot, ScalarFieldSnapshot]:
    """
    Reference, physical-head and mapped SSV-head fields on one eval grid.

    :param heads: (physical head, SSV head)
    :return: Three snapshots at time t sharing the same grid
    """
    truth_snapshot = temporal_interpolate(reference, t)
    extent = triptych_half_width(spec, t)
    n = spec.resolution + spec.resolution % 2
    if truth_snapshot.grid.ndim == 1:
        grid = Grid1D(n=n, x_min=-extent, x_max=extent)
        points = grid.nodes()[:, None]
    else:
        grid = Grid2D(n=n, half_width=extent)
        X, Y = grid.mesh()
        points = np.column_stack([X.reshape(-1), Y.reshape(-1)])

    query = points[:, 0] if points.shape[1] == 1 else points
    panels = [sample_points(truth_snapshot.grid, truth_snapshot.values, query)]
    for head in heads:
        panels.append(np.asarray(_as_predictor(head)(points, t), dtype=np.float64))
    first, second, third = (ScalarFieldSnapshot(grid=grid, t=t, values=v) for v in panels)
    return first, second, third


def count_local_maxima(snapshot: ScalarFieldSnapshot, rel_threshold: float = 0.25) -> int:
    """Strict local maxima over the 3x3 (or 3-point) neighbourhood above rel_threshold * global max."""
    v = snapshot.values
    peak = float(np.max(v))
    if peak <= 0:
        return 0
    footprint = np.ones((3,) * v.ndim, dtype=bool)
    footprint[(1,) * v.ndim] = False
    neighbours = maximum_filter(v, footprint=footprint, mode="constant", cval=-np.inf)
    return int(np.count_nonzero((v > neighbours) & (v > rel_threshold * peak)))


def _series_stride(series: FieldSeries, stride: int, t_max: Optional[float] = None) -> List[int]:
    if stride < 1:
        raise DomainError(f"stride must be >= 1, got {stride}")
    last = len(series) - 1
    if t_max is not None:
        last = int(np.searchsorted(series.times, t_max + 1e-12, side="right")) - 1
        if last < 0:
            raise DomainError(f"No snapshot at or before t_max={t_max}")
    indices = list(range(0, last + 1, stride))
    if indices[-1] != last:
        indices.append(last)
    return indices


def largest_window_time(grid: Union[Grid1D, Grid2D], C: float) -> float:
    """Latest t whose window of radius C sqrt(t+1) still lies inside the sampling box of grid."""
    if isinstance(grid, Grid2D):
        reach = grid.half_width - grid.spacing
    else:
        reach = min(-grid.x_min, grid.x_max)
    return (reach / C) ** 2 - 1.0


def gaussian_convergence_series(
    reference: FieldSeries,
    C: float = 5.0,
    resolution: int = 256,
    stride: int = 1,
    t_max: Optional[float] = None,
    label: str = "oseen-distance",
) -> MetricSeries:
    """
    L2 distance on D_C between the rescaled vorticity Omega(tau) and Gamma * G.

    Gamma is the circulation of the first snapshot; the distance should decay as
    the flow approaches the Oseen vortex.
    """
    if not isinstance(reference.grid, Grid2D):
        raise DomainError("Oseen convergence needs a 2D vorticity series")
    circulation = float(np.sum(reference.values[0]) * reference.grid.cell_area)

    def target(xi):
        return circulation * oseen_vortex(xi)

    rows = []
    for k in _series_stride(reference, stride, t_max):
        snapshot = reference.snapshot(k)
        t = snapshot.t
        rescaled = _rescaled_field(snapshot, amplitude=t + 1.0)
        dist2 = windowed_l2_ssv(rescaled, target, C, float(np.log1p(t)), dim=2, resolution=resolution)
        rows.append((t, np.sqrt(dist2)))
    return MetricSeries.from_rows(label, rows)


def diffusion_wave_distance(
    reference: FieldSeries,
    M: Optional[float] = None,
    C: float = 5.0,
    resolution: int = 2048,
    stride: int = 1,
    t_max: Optional[float] = None,
    label: str = "diffusion-wave-distance",
) -> MetricSeries:
    """
    L2 distance on I_C between w(xi, tau) = sqrt(t+1) u(sqrt(t+1) xi, t) and the diffusion wave of mass M.

    M defaults to the mass of the first snapshot.
    """
    if not isinstance(reference.grid, Grid1D):
        raise DomainError("Diffusion-wave distance needs a 1D velocity series")
    if M is None:
        M = float(trapezoid(reference.values[0], reference.grid.nodes()))
    target = DiffusionWaveParams(M=M).profile

    rows = []
    for k in _series_stride(reference, stride, t_max):
        snapshot = reference.snapshot(k)
        t = snapshot.t
        rescaled = _rescaled_field(snapshot, amplitude=np.sqrt(t + 1.0))
        dist2 = windowed_l2_ssv(rescaled, target, C, float(np.log1p(t)), dim=1, resolution=resolution)
        rows.append((t, np.sqrt(dist2)))
    return MetricSeries.from_rows(label, rows)


def _rescaled_field(snapshot: ScalarFieldSnapshot, amplitude: float) -> FieldFn:
    """xi -> amplitude * field(sqrt(t+1) xi)."""
    scale = np.sqrt(snapshot.t + 1.0)
    return lambda xi: amplitude * sample_points(snapshot.grid, snapshot.values, np.asarray(xi) * scale)


def time_averaged(metric: MetricSeries) -> float:
    """Trapezoid average over the metric's time span."""
    if len(metric) == 1:
        return float(metric.values[0])
    span = float(metric.times[-1] - metric.times[0])
    return float(trapezoid(metric.values, metric.times) / span)


def seed_median(series: Sequence[MetricSeries], label: Optional[str] = None) -> MetricSeries:
    """Pointwise median over runs that share the same evaluation times."""
    if not series:
        raise DomainError("seed_median needs at least one series")
    times = series[0].times
    for s in series[1:]:
        if s.times.shape != times.shape or not np.allclose(s.times, times, rtol=0.0, atol=1e-12):
            raise DomainError(f"Series {s.label} has different evaluation times")
    stacked = np.stack([s.values for s in series])
    return MetricSeries(label=label or series[0].label, times=times.copy(), values=np.median(stacked, axis=0))