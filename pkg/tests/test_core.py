# tests/test_core.py

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from ssvlab.core.config import Settings, read_config_file
from ssvlab.core.errors import ConfigError, DomainError, MissingArtifactError, NumericalAbort, SsvlabError
from ssvlab.core.grids import Grid1D, Grid2D, Window
from ssvlab.core.interpolation import bilinear_sample, sample_points, sample_space_time, temporal_interpolate
from ssvlab.core.rng import SeededRng, sample_uniform_disk, sample_uniform_interval
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot


def test_exit_codes():
    assert SsvlabError("x").exit_code == 1
    assert ConfigError("x").exit_code == 2
    assert MissingArtifactError("x").exit_code == 3
    assert NumericalAbort("x", diagnostic={"step": 3}).diagnostic == {"step": 3}
    assert issubclass(DomainError, ValueError)


def test_settings_defaults(monkeypatch):
    monkeypatch.delenv("SSVLAB_THREADS", raising=False)
    s = Settings(_env_file=None)
    assert s.THREADS == 1
    assert s.LOG_LEVEL == "INFO"


def test_settings_reject_zero_threads(monkeypatch):
    monkeypatch.setenv("SSVLAB_THREADS", "0")
    with pytest.raises(ValidationError):
        Settings(_env_file=None)


def test_read_config_file(tmp_path):
    path = tmp_path / "exp.env"
    path.write_text("# comment\nSYSTEM=ns2d\nSEED=3\nLABEL=\n", encoding="utf-8")
    assert read_config_file(str(path)) == {"SYSTEM": "ns2d", "SEED": "3"}


def test_read_config_file_missing(tmp_path):
    with pytest.raises(ConfigError):
        read_config_file(str(tmp_path / "nope.env"))


def test_grid2d_layout():
    grid = Grid2D(n=8, half_width=4.0)
    assert grid.spacing == 1.0
    np.testing.assert_allclose(grid.nodes(), np.arange(-4.0, 4.0))
    X, Y = grid.mesh()
    assert X[1, 0] == -3.0 and Y[0, 1] == -3.0
    assert grid.bounds() == ((-4.0, 3.0), (-4.0, 3.0))


def test_grid2d_rejects_odd_n():
    with pytest.raises(ValidationError):
        Grid2D(n=9, half_width=1.0)


def test_grid1d_includes_endpoints():
    grid = Grid1D(n=5, x_min=-1.0, x_max=1.0)
    np.testing.assert_allclose(grid.nodes(), [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_window_radius():
    assert Window(C=5.0).physical_radius(3.0) == pytest.approx(10.0)


def test_window_uses_radial_norm_for_a_single_point():
    window = Window(C=5.0)
    inside = window.contains(np.array([4.0, 4.0]))
    assert np.ndim(inside) == 0
    assert not inside
    assert window.contains(np.array([3.0, 4.0]))


def test_window_batches_and_1d():
    points = np.array([[0.0, 4.9], [3.6, 3.6], [-5.0, 0.0]])
    np.testing.assert_array_equal(Window(C=5.0).contains(points), [True, False, True])
    line = Window(C=2.0, dim=1)
    np.testing.assert_array_equal(line.contains(np.array([-2.5, 0.0, 2.0])), [False, True, True])
    np.testing.assert_array_equal(line.contains(np.array([[1.0], [3.0]])), [True, False])


def test_window_physical_membership_expands():
    window = Window(C=5.0)
    point = np.array([6.0, 0.0])
    assert not window.contains_physical(point, 0.0)
    assert window.contains_physical(point, 1.0)


def test_window_rejects_wrong_point_dimension():
    with pytest.raises(DomainError):
        Window(C=1.0).contains(np.zeros((4, 3)))


def test_rng_is_reproducible():
    a = SeededRng(42).random(10)
    b = SeededRng(42).random(10)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(SeededRng.for_stream(42, 1).random(4), SeededRng.for_stream(42, 2).random(4))


@given(st.floats(0.0, 20.0), st.integers(0, 200), st.integers(0, 2**32 - 1))
def test_disk_samples_stay_inside(C, M, seed):
    points = sample_uniform_disk(SeededRng(seed), C, M)
    assert points.shape == (M, 2)
    assert np.all(np.hypot(points[:, 0], points[:, 1]) <= C)


def test_disk_zero_radius_gives_origin():
    np.testing.assert_array_equal(sample_uniform_disk(SeededRng(0), 0.0, 4), np.zeros((4, 2)))


def test_disk_rejects_negative():
    with pytest.raises(DomainError):
        sample_uniform_disk(SeededRng(0), -1.0, 3)


def test_disk_is_area_uniform():
    points = sample_uniform_disk(SeededRng(7), 1.0, 200_000)
    inner = np.mean(np.hypot(points[:, 0], points[:, 1]) <= 0.5)
    assert inner == pytest.approx(0.25, abs=0.005)


def test_interval_samples():
    draws = sample_uniform_interval(SeededRng(1), -2.0, 3.0, 1000)
    assert draws.min() >= -2.0 and draws.max() <= 3.0
    np.testing.assert_array_equal(sample_uniform_interval(SeededRng(1), 0.5, 0.5, 3), [0.5, 0.5, 0.5])
    with pytest.raises(DomainError):
        sample_uniform_interval(SeededRng(1), 1.0, 0.0, 3)


def test_bilinear_exact_at_nodes_and_linear_fields(grid2d):
    X, Y = grid2d.mesh()
    snap = ScalarFieldSnapshot(grid=grid2d, t=0.0, values=2.0 * X - Y + 1.0)
    assert bilinear_sample(snap, (X[3, 5], Y[3, 5])) == pytest.approx(snap.values[3, 5])
    assert bilinear_sample(snap, (0.3, -1.7)) == pytest.approx(2.0 * 0.3 + 1.7 + 1.0)


def test_bilinear_rejects_outside(grid2d):
    snap = ScalarFieldSnapshot(grid=grid2d, t=0.0, values=np.zeros(grid2d.shape))
    with pytest.raises(DomainError):
        bilinear_sample(snap, (grid2d.half_width, 0.0))


def test_sample_points_1d(grid1d):
    x = grid1d.nodes()
    values = sample_points(grid1d, 3.0 * x, [-10.0, 0.05, 10.0])
    np.testing.assert_allclose(values, [-30.0, 0.15, 30.0])


def test_temporal_interpolation_is_linear(linear_series_1d):
    snap = temporal_interpolate(linear_series_1d, 0.55)
    np.testing.assert_allclose(snap.values, linear_series_1d.grid.nodes() + 1.1)
    with pytest.raises(DomainError):
        temporal_interpolate(linear_series_1d, 1.5)


def test_space_time_sampling(linear_series_1d):
    points = np.array([-3.0, 0.25, 9.5])
    times = np.array([0.0, 0.33, 1.0])
    np.testing.assert_allclose(sample_space_time(linear_series_1d, points, times), points + 2.0 * times, atol=1e-12)


def test_series_rejects_unordered_times(grid1d):
    with pytest.raises(ValidationError):
        FieldSeries(grid=grid1d, times=np.array([0.0, 0.0]), values=np.zeros((2, grid1d.n)))


def test_snapshot_values_are_read_only(grid1d):
    snap = ScalarFieldSnapshot(grid=grid1d, t=0.0, values=np.zeros(grid1d.n))
    with pytest.raises(ValueError):
        snap.values[0] = 1.0
