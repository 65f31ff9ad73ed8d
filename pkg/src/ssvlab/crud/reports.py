# src/ssvlab/crud/reports.py
"""Loss/metric CSVs, PGM previews and run manifests."""

import logging
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import TypeAdapter

from ssvlab.core.errors import ArtifactFormatError, MissingArtifactError, SsvlabError
from ssvlab.core.grids import Grid1D
from ssvlab.models.fields import ScalarFieldSnapshot
from ssvlab.models.metrics import MetricSeries
from ssvlab.models.training import TrainedHead
from ssvlab.schemas.manifest import OrderingReport, PeaksReport, RunManifest

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"
METRIC_COLUMN = "rel_mse"
ORDERING_ADAPTER = TypeAdapter(List[OrderingReport])


def _require(path: PathLike) -> Path:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"Artifact not found: {path}")
    return path


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_loss_csv(path: PathLike, head: TrainedHead) -> Path:
    """Loss history as `step,loss`."""
    path = _prepare(path)
    frame = pd.DataFrame({
        "step": head.loss_history[:, 0].astype(np.int64),
        "loss": head.loss_history[:, 1],
    })
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_loss_csv(path: PathLike) -> np.ndarray:
    frame = pd.read_csv(_require(path))
    return frame[["step", "loss"]].to_numpy(dtype=np.float64).reshape(-1, 2)


def write_metric_csv(path: PathLike, metric: MetricSeries, column: str = METRIC_COLUMN) -> Path:
    """Metric curve as `t,<column>,label`; RelMSE sweeps use `rel_mse`."""
    path = _prepare(path)
    frame = pd.DataFrame({
        "t": metric.times,
        column: metric.values,
        "label": [metric.label] * len(metric),
    })
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(metric)} metric rows to {path}")
    return path


def read_metric_csv(path: PathLike, column: str = METRIC_COLUMN) -> MetricSeries:
    frame = pd.read_csv(_require(path), keep_default_na=False)
    if list(frame.columns) != ["t", column, "label"]:
        raise ArtifactFormatError(f"Unexpected metric CSV header in {path}: {list(frame.columns)}")
    label = str(frame["label"].iloc[0]) if len(frame) else ""
    return MetricSeries(label=label, times=frame["t"].to_numpy(float), values=frame[column].to_numpy(float))


def to_gray(values: np.ndarray) -> np.ndarray:
    """Linear map of [min, max] onto 0..255; constant fields map to 0."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = float(v.min()), float(v.max())
    if hi <= lo:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.rint(255.0 * (v - lo) / (hi - lo)).astype(np.uint8)


def write_pgm(path: PathLike, snapshot: ScalarFieldSnapshot) -> Path:
    """
    8-bit binary graymap (P5). Rows follow the first array axis, top to bottom.

    1D fields are written as a single row.
    """
    path = _prepare(path)
    gray = to_gray(snapshot.values)
    if gray.ndim == 1:
        gray = gray[None, :]
    height, width = gray.shape
    path.write_bytes(f"P5\n{width} {height}\n255\n".encode("ascii") + gray.tobytes())
    return path


def read_pgm(path: PathLike) -> np.ndarray:
    data = _require(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or len(parts) < 4:
        raise ArtifactFormatError(f"Not a binary PGM file: {path}")
    width, height = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8, count=width * height).reshape(height, width)


def write_curves_csv(path: PathLike, snapshots: Sequence[ScalarFieldSnapshot], names: Sequence[str]) -> Path:
    """1D triptych as columns `x,<name>...`; every curve shares the same interval."""
    grid = snapshots[0].grid
    if not isinstance(grid, Grid1D):
        raise SsvlabError("Curve CSVs are for 1D snapshots")
    if any(s.grid != grid for s in snapshots):
        raise SsvlabError("Curves must share one grid")
    path = _prepare(path)
    columns = {"x": grid.nodes()}
    for name, snapshot in zip(names, snapshots):
        columns[name] = snapshot.values
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_manifest(path: PathLike, manifest: RunManifest) -> Path:
    path = _prepare(path)
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Manifest written to {path}")
    return path


def read_manifest(path: PathLike) -> RunManifest:
    return RunManifest.model_validate_json(_require(path).read_text(encoding="utf-8"))


def write_ordering(path: PathLike, reports: Sequence[OrderingReport]) -> Path:
    path = _prepare(path)
    path.write_bytes(ORDERING_ADAPTER.dump_json(list(reports), indent=2))
    return path


def read_ordering(path: PathLike) -> List[OrderingReport]:
    return ORDERING_ADAPTER.validate_json(_require(path).read_bytes())


def write_peaks(path: PathLike, report: PeaksReport) -> Path:
    path = _prepare(path)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path


def read_peaks(path: PathLike) -> PeaksReport:
    return PeaksReport.model_validate_json(_require(path).read_text(encoding="utf-8"))
