# src/ssvlab/crud/fields.py
"""
SSF1 field files.

Layout (little-endian): magic "SSF1", u8 dimensionality, u32 n per axis,
f64 geometry (x_min, x_max for 1D; L for 2D), u32 snapshot count, then per
snapshot an f64 time followed by the row-major f64 values.
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from ssvlab.core.errors import ArtifactFormatError, MissingArtifactError
from ssvlab.core.grids import Grid1D, Grid2D
from ssvlab.models.fields import FieldSeries

logger = logging.getLogger(__name__)

MAGIC = b"SSF1"


def _unpack(fmt: str, data: bytes, offset: int) -> tuple:
    try:
        return struct.unpack_from(fmt, data, offset)
    except struct.error as e:
        raise ArtifactFormatError(f"SSF1 header is truncated at byte {offset}") from e


def encode_series(series: FieldSeries) -> bytes:
    grid = series.grid
    if isinstance(grid, Grid1D):
        header = MAGIC + struct.pack("<BIdd", 1, grid.n, grid.x_min, grid.x_max)
    else:
        header = MAGIC + struct.pack("<BId", 2, grid.n, grid.half_width)
    parts = [header, struct.pack("<I", len(series))]
    per_snapshot = grid.size
    body = np.empty((len(series), 1 + per_snapshot), dtype="<f8")
    body[:, 0] = series.times
    body[:, 1:] = series.values.reshape(len(series), per_snapshot)
    parts.append(body.tobytes())
    return b"".join(parts)


def decode_series(data: bytes) -> FieldSeries:
    if data[:4] != MAGIC:
        raise ArtifactFormatError(f"Not an SSF1 file (magic {data[:4]!r})")
    offset = 4
    (dim,) = _unpack("<B", data, offset)
    offset += 1
    (n,) = _unpack("<I", data, offset)
    offset += 4
    if dim == 1:
        x_min, x_max = _unpack("<dd", data, offset)
        offset += 16
        geometry = dict(n=n, x_min=x_min, x_max=x_max)
    elif dim == 2:
        (half_width,) = _unpack("<d", data, offset)
        offset += 8
        geometry = dict(n=n, half_width=half_width)
    else:
        raise ArtifactFormatError(f"SSF1 dimensionality must be 1 or 2, got {dim}")
    try:
        grid: Union[Grid1D, Grid2D] = (Grid1D if dim == 1 else Grid2D)(**geometry)
    except ValidationError as e:
        raise ArtifactFormatError(f"SSF1 header describes an invalid grid: {geometry}") from e
    (count,) = _unpack("<I", data, offset)
    offset += 4

    expected = count * (1 + grid.size) * 8
    if len(data) - offset != expected:
        raise ArtifactFormatError(f"SSF1 payload has {len(data) - offset} bytes, expected {expected}")
    body = np.frombuffer(data, dtype="<f8", offset=offset).reshape(count, 1 + grid.size)
    return FieldSeries(
        grid=grid,
        times=body[:, 0].astype(np.float64),
        values=body[:, 1:].astype(np.float64).reshape((count,) + grid.shape),
    )


def write_series(path: Union[str, Path], series: FieldSeries) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_series(series))
    logger.info(f"Wrote {len(series)} snapshots to {path}")
    return path


def read_series(path: Union[str, Path]) -> FieldSeries:
    """
    Load an SSF1 file.

    :raises: MissingArtifactError if the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"Field file not found: {path}")
    series = decode_series(path.read_bytes())
    logger.debug(f"Read {len(series)} snapshots from {path}")
    return series
