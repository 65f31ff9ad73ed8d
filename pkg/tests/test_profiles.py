# tests/test_profiles.py

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import quad
from scipy.special import erf, erfc

from ssvlab.core.errors import DomainError
from ssvlab.services.profiles import (
    DiffusionWaveParams,
    TwoGaussianParams,
    bipolar_box_antiderivative,
    burgers_initial_bipolar_box,
    diffusion_wave,
    heat_gaussian,
    lamb_oseen_exact,
    ns_initial_two_gaussians,
    oseen_gradient,
    oseen_velocity,
    oseen_vortex,
    ssv_operator_residual,
    ssv_operator_residual_fd,
    total_mass_two_gaussians,
)


def test_oseen_peak_value():
    assert oseen_vortex(np.zeros(2)) == pytest.approx(1.0 / (4.0 * np.pi), rel=1e-15)


def test_oseen_has_unit_mass():
    h = 0.05
    axis = np.arange(-20.0, 20.0, h) + h / 2
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    mass = oseen_vortex(np.stack([X, Y], axis=-1)).sum() * h * h
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_oseen_is_stationary():
    rng = np.random.default_rng(0)
    xi = rng.uniform(-5.0, 5.0, size=(200, 2))
    assert np.max(np.abs(ssv_operator_residual(xi))) < 1e-15
    assert np.max(np.abs(ssv_operator_residual_fd(xi, h=1e-3))) < 1e-7


def test_oseen_gradient_matches_differences():
    rng = np.random.default_rng(1)
    xi = rng.uniform(-4.0, 4.0, size=(50, 2))
    h = 1e-5
    dx = (oseen_vortex(xi + [h, 0.0]) - oseen_vortex(xi - [h, 0.0])) / (2.0 * h)
    dy = (oseen_vortex(xi + [0.0, h]) - oseen_vortex(xi - [0.0, h])) / (2.0 * h)
    np.testing.assert_allclose(oseen_gradient(xi), np.column_stack([dx, dy]), atol=1e-10)


def test_oseen_self_advection_vanishes():
    rng = np.random.default_rng(2)
    xi = np.vstack([np.zeros((1, 2)), rng.uniform(-8.0, 8.0, size=(500, 2))])
    advection = np.sum(oseen_velocity(xi) * oseen_gradient(xi), axis=-1)
    assert np.max(np.abs(advection)) <= 1e-12


def test_oseen_velocity():
    np.testing.assert_array_equal(oseen_velocity(np.zeros(2)), [0.0, 0.0])
    u = oseen_velocity(np.array([2.0, 0.0]))
    expected = (1.0 - math.exp(-1.0)) / (2.0 * np.pi * 2.0)
    assert u[0] == pytest.approx(0.0, abs=1e-15)
    assert u[1] == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("M", [0.5, 1.0, 2.0, 3.0])
def test_diffusion_wave_mass(M):
    mass, _ = quad(lambda xi: float(diffusion_wave(xi, M)), -60.0, 60.0, limit=200)
    assert abs(mass - M) <= 1e-6
    assert mass == pytest.approx(M, rel=1e-8)


def test_diffusion_wave_params_profile():
    wave = DiffusionWaveParams(M=2.0)
    xi = np.linspace(-8.0, 8.0, 33)
    assert wave.c == pytest.approx(1.0 - math.exp(-1.0), rel=1e-15)
    np.testing.assert_array_equal(wave.profile(xi), diffusion_wave(xi, 2.0))
    # Positive mass skews the wave toward xi > 0
    assert np.argmax(wave.profile(xi)) > 16


@pytest.mark.parametrize("M", [float("nan"), float("inf")])
def test_diffusion_wave_params_reject_non_finite_mass(M):
    with pytest.raises(ValidationError):
        DiffusionWaveParams(M=M)


def test_scipy_error_functions_match_math():
    xs = np.linspace(-6.0, 6.0, 241)
    np.testing.assert_allclose(erf(xs), [math.erf(x) for x in xs], rtol=1e-14, atol=1e-16)
    np.testing.assert_allclose(erfc(xs), [math.erfc(x) for x in xs], rtol=1e-13, atol=1e-300)


def test_diffusion_wave_zero_mass_is_zero():
    np.testing.assert_array_equal(diffusion_wave(np.linspace(-5, 5, 11), 0.0), np.zeros(11))


def test_diffusion_wave_rejects_extreme_negative_mass():
    with pytest.raises(DomainError):
        diffusion_wave(np.array([50.0]), -2000.0)


def test_two_gaussians_mass():
    params = TwoGaussianParams()
    h = 0.05
    axis = np.arange(-20.0, 20.0, h)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    mass = ns_initial_two_gaussians(X, Y, params).sum() * h * h
    assert mass == pytest.approx(total_mass_two_gaussians(params), rel=1e-10)
    assert total_mass_two_gaussians(params) == pytest.approx(np.pi * (1.0 + 0.6 * 1.69))


def test_bipolar_box():
    x = np.array([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
    np.testing.assert_array_equal(burgers_initial_bipolar_box(x), [0, 0, 1, 0, -1, 0, 0])
    np.testing.assert_allclose(bipolar_box_antiderivative(x), [0, 0, 0.5, 1, 0.5, 0, 0])


def test_lamb_oseen_matches_self_similar_profile():
    x = np.array([[1.0, 2.0], [0.0, 0.0]])
    t = 3.0
    expected = oseen_vortex(x / np.sqrt(t + 1.0)) / (t + 1.0)
    np.testing.assert_allclose(lamb_oseen_exact(x, t), expected, rtol=1e-14)
    with pytest.raises(DomainError):
        lamb_oseen_exact(x, -1.0)


def test_heat_gaussian_initial_and_mass():
    x = np.array([[1.0, 0.0]])
    assert heat_gaussian(x, 0.0, amplitude=2.0)[0] == pytest.approx(2.0 * math.exp(-1.0))
    h = 0.1
    axis = np.arange(-30.0, 30.0, h)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    mass = heat_gaussian(np.stack([X, Y], axis=-1), 2.0).sum() * h * h
    assert mass == pytest.approx(np.pi, rel=1e-8)
