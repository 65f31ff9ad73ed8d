# src/ssvlab/models/metrics.py

from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator


class MetricSeries(BaseModel):
    """Error values over strictly increasing times, labelled by head/arch/system."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    times: np.ndarray
    values: np.ndarray

    @model_validator(mode="after")
    def check_rows(self):
        times = np.asarray(self.times, dtype=np.float64).reshape(-1)
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if times.size != values.size:
            raise ValueError(f"MetricSeries has {times.size} times but {values.size} values")
        if np.any(np.diff(times) <= 0):
            raise ValueError("MetricSeries times must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("MetricSeries values must be finite and non-negative")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        return self

    @classmethod
    def from_rows(cls, label: str, rows: Sequence[Tuple[float, float]]) -> "MetricSeries":
        rows = sorted(rows)
        return cls(
            label=label,
            times=np.array([r[0] for r in rows], dtype=np.float64),
            values=np.array([r[1] for r in rows], dtype=np.float64),
        )

    def __len__(self) -> int:
        return int(self.times.size)

    def rows(self) -> List[Tuple[float, float]]:
        return [(float(t), float(v)) for t, v in zip(self.times, self.values)]
