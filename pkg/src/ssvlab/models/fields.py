# src/ssvlab/models/fields.py

from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ssvlab.core.grids import Grid1D, Grid2D


class ScalarFieldSnapshot(BaseModel):
    """Scalar field (vorticity or velocity) sampled on a grid at one physical time."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D | Grid2D
    t: float
    values: np.ndarray

    @field_validator("t")
    @classmethod
    def check_time(cls, v):
        if not np.isfinite(v) or v < 0:
            raise ValueError(f"Snapshot time must be finite and >= 0, got {v}")
        return float(v)

    @model_validator(mode="after")
    def check_values(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.size != self.grid.size:
            raise ValueError(f"Snapshot has {values.size} values, grid expects {self.grid.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Snapshot values must be finite")
        values = values.reshape(self.grid.shape)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        return self

    def flat(self) -> np.ndarray:
        """Row-major flat view of the values."""
        return self.values.reshape(-1)


class FieldSeries(BaseModel):
    """
    Time-ordered snapshots on one shared grid.

    Stored stacked: values[k] is the field at times[k].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid1D | Grid2D
    times: np.ndarray
    values: np.ndarray

    @model_validator(mode="after")
    def check_series(self):
        times = np.asarray(self.times, dtype=np.float64).reshape(-1)
        values = np.asarray(self.values, dtype=np.float64)
        if times.size == 0:
            raise ValueError("FieldSeries needs at least one snapshot")
        if np.any(np.diff(times) <= 0):
            raise ValueError("FieldSeries times must be strictly increasing")
        if times[0] < 0:
            raise ValueError("FieldSeries times must be >= 0")
        values = values.reshape((times.size,) + self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("FieldSeries values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        return self

    @classmethod
    def from_snapshots(cls, snapshots: Sequence[ScalarFieldSnapshot]) -> "FieldSeries":
        if not snapshots:
            raise ValueError("FieldSeries needs at least one snapshot")
        grid = snapshots[0].grid
        for snap in snapshots[1:]:
            if snap.grid != grid:
                raise ValueError("All snapshots of a series must share one grid")
        return cls(
            grid=grid,
            times=np.array([s.t for s in snapshots]),
            values=np.stack([s.values for s in snapshots]),
        )

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def t_first(self) -> float:
        return float(self.times[0])

    @property
    def t_last(self) -> float:
        return float(self.times[-1])

    def snapshot(self, k: int) -> ScalarFieldSnapshot:
        return ScalarFieldSnapshot(grid=self.grid, t=float(self.times[k]), values=self.values[k])

    @property
    def snapshots(self) -> List[ScalarFieldSnapshot]:
        return [self.snapshot(k) for k in range(len(self))]
