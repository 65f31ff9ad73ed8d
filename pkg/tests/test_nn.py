# tests/test_nn.py

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from ssvlab.core.errors import DomainError, NumericalAbort
from ssvlab.core.rng import SeededRng
from ssvlab.models.network import AdamState, NetworkParams
from ssvlab.nn import (
    adam_step,
    build_adam_hyper,
    build_arch,
    evaluate,
    fcn_forward,
    grad_mse,
    init_params,
    mlp_forward,
    scheduled_lr,
)
from ssvlab.schemas.network import Activation, AdamHyper, ArchTag, FcnArch, LrSchedule, MlpArch


def _finite_difference_grad(params: NetworkParams, Z, y, h: float = 1e-6) -> np.ndarray:
    theta = params.theta.copy()
    grad = np.empty_like(theta)
    for i in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[i] += h
        minus[i] -= h
        lp, _ = grad_mse(params.with_theta(plus), Z, y)
        lm, _ = grad_mse(params.with_theta(minus), Z, y)
        grad[i] = (lp - lm) / (2 * h)
    return grad


@pytest.mark.parametrize("activation", list(Activation))
def test_mlp_gradient_matches_finite_differences(activation):
    arch = MlpArch(input_dim=3, hidden=[5, 4], activation=activation)
    params = init_params(SeededRng(3), arch)
    rng = np.random.default_rng(0)
    Z = rng.normal(size=(7, 3))
    y = rng.normal(size=7)
    _, grad = grad_mse(params, Z, y)
    np.testing.assert_allclose(grad, _finite_difference_grad(params, Z, y), rtol=1e-5, atol=1e-7)


def test_fcn_gradient_matches_finite_differences():
    arch = build_arch(ArchTag.FCN, input_dim=2, width=6, depth=2, latent=3)
    params = init_params(SeededRng(5), arch)
    params = params.with_theta(params.theta + 0.1)
    rng = np.random.default_rng(1)
    Z = rng.normal(size=(6, 2))
    y = rng.normal(size=6)
    _, grad = grad_mse(params, Z, y)
    np.testing.assert_allclose(grad, _finite_difference_grad(params, Z, y), rtol=1e-5, atol=1e-7)


def test_param_counts():
    arch = MlpArch(input_dim=3, hidden=[4], output_dim=2)
    assert arch.param_count == 4 * 3 + 4 + 2 * 4 + 2
    fcn = FcnArch(
        branch=MlpArch(input_dim=1, hidden=[2], output_dim=3),
        trunk=MlpArch(input_dim=2, hidden=[2], output_dim=3),
    )
    assert fcn.param_count == (2 + 2 + 6 + 3) + (4 + 2 + 6 + 3) + 1


def test_fcn_latent_mismatch_rejected():
    with pytest.raises(ValidationError):
        FcnArch(
            branch=MlpArch(input_dim=1, hidden=[2], output_dim=3),
            trunk=MlpArch(input_dim=2, hidden=[2], output_dim=4),
        )


def test_mlp_forward_by_hand():
    arch = MlpArch(input_dim=1, hidden=[1])
    # W1 = 2, b1 = 0, W2 = 3, b2 = 1
    params = NetworkParams(arch=arch, theta=np.array([2.0, 0.0, 3.0, 1.0]))
    assert mlp_forward(params, [0.5]) == pytest.approx(3.0 * np.tanh(1.0) + 1.0)


def test_fcn_forward_is_bias_when_branch_vanishes():
    arch = build_arch(ArchTag.FCN, input_dim=3, width=4, depth=2, latent=2)
    theta = np.zeros(arch.param_count)
    theta[-1] = 0.25
    params = NetworkParams(arch=arch, theta=theta)
    assert fcn_forward(params, 0.3, [1.0, 2.0, 0.3]) == 0.25


def test_forward_dimension_checks():
    params = init_params(SeededRng(0), MlpArch(input_dim=2, hidden=[3]))
    with pytest.raises(DomainError):
        mlp_forward(params, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        fcn_forward(params, 0.0, [1.0, 2.0])
    with pytest.raises(DomainError):
        grad_mse(params, np.zeros((0, 2)), np.zeros(0))


def test_batched_evaluate_matches_single_calls():
    params = init_params(SeededRng(9), build_arch(ArchTag.FCN, input_dim=2, width=5, depth=2, latent=3))
    Z = np.array([[0.1, 0.2], [-1.0, 0.7]])
    batched = evaluate(params, Z)
    singles = [fcn_forward(params, z[-1], z) for z in Z]
    np.testing.assert_allclose(batched, singles, rtol=1e-14)


def test_init_is_reproducible():
    arch = build_arch(ArchTag.MLP, input_dim=3, width=8, depth=2)
    a = init_params(SeededRng(11), arch)
    b = init_params(SeededRng(11), arch)
    np.testing.assert_array_equal(a.theta, b.theta)


def test_build_arch_defaults():
    mlp = build_arch(ArchTag.MLP, input_dim=3)
    assert mlp.hidden == [128] * 4 and mlp.activation == Activation.TANH
    fcn = build_arch(ArchTag.FCN, input_dim=2)
    assert fcn.latent == 64 and fcn.trunk.hidden == [128] * 4 and fcn.branch.hidden == [64] * 3


def test_adam_first_step_moves_by_lr():
    params = NetworkParams(arch=MlpArch(input_dim=1, hidden=[1]), theta=np.zeros(4))
    state = AdamState.fresh(4, AdamHyper(lr=0.01))
    grads = np.array([2.0, -3.0, 0.5, -0.1])
    new_params, new_state = adam_step(params, grads, state)
    np.testing.assert_allclose(new_params.theta, -0.01 * np.sign(grads), rtol=1e-5)
    assert new_state.step == 1


def test_adam_rejects_non_finite_gradient():
    params = NetworkParams(arch=MlpArch(input_dim=1, hidden=[1]), theta=np.zeros(4))
    with pytest.raises(NumericalAbort):
        adam_step(params, np.array([0.0, np.nan, 0.0, 0.0]), AdamState.fresh(4))


def test_adam_minimises_quadratic():
    params = NetworkParams(arch=MlpArch(input_dim=1, hidden=[1]), theta=np.array([3.0, -2.0, 1.0, 4.0]))
    hyper = AdamHyper(lr=0.05, lr_final=1e-4)
    state = AdamState.fresh(4, hyper)
    for k in range(2000):
        params, state = adam_step(params, 2.0 * params.theta, state, lr=scheduled_lr(hyper, k, 2000))
    assert np.max(np.abs(params.theta)) < 1e-2


@given(st.integers(0, 999))
def test_cosine_schedule_stays_between_bounds(step):
    hyper = build_adam_hyper(lr=1e-3, lr_final=1e-5)
    lr = scheduled_lr(hyper, step, 1000)
    assert 1e-5 - 1e-18 <= lr <= 1e-3 + 1e-18


def test_cosine_schedule_endpoints():
    hyper = build_adam_hyper(lr=1e-3, lr_final=1e-5)
    assert scheduled_lr(hyper, 0, 100) == pytest.approx(1e-3)
    assert scheduled_lr(hyper, 99, 100) == pytest.approx(1e-5)
    assert scheduled_lr(AdamHyper(schedule=LrSchedule.CONSTANT), 50, 100) == 1e-3
