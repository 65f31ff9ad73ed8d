# tests/conftest.py

import os

import hypothesis
import numpy as np
import pytest

from ssvlab.core.grids import Grid1D, Grid2D
from ssvlab.models.fields import FieldSeries

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


@pytest.fixture
def grid2d() -> Grid2D:
    return Grid2D(n=32, half_width=8.0)


@pytest.fixture
def grid1d() -> Grid1D:
    return Grid1D(n=201, x_min=-10.0, x_max=10.0)


@pytest.fixture
def linear_series_1d(grid1d) -> FieldSeries:
    """u(x, t) = x + 2t on [-10, 10] x [0, 1]; reproduced exactly by linear interpolation."""
    times = np.linspace(0.0, 1.0, 11)
    x = grid1d.nodes()
    return FieldSeries(grid=grid1d, times=times, values=x[None, :] + 2.0 * times[:, None])


@pytest.fixture
def zero_series_2d(grid2d) -> FieldSeries:
    times = np.linspace(0.0, 1.0, 5)
    return FieldSeries(grid=grid2d, times=times, values=np.zeros((times.size,) + grid2d.shape))


@pytest.fixture
def zero_series_1d(grid1d) -> FieldSeries:
    times = np.linspace(0.0, 1.0, 5)
    return FieldSeries(grid=grid1d, times=times, values=np.zeros((times.size,) + grid1d.shape))
