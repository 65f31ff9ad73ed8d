# src/ssvlab/nn/adam.py

import logging
from typing import Optional, Tuple

import numpy as np

from ssvlab.core.errors import DomainError, NumericalAbort
from ssvlab.models.network import AdamState, NetworkParams
from ssvlab.schemas.network import AdamHyper, LrSchedule

logger = logging.getLogger(__name__)


def scheduled_lr(hyper: AdamHyper, step: int, total_steps: int) -> float:
    """Learning rate for a 0-based step under the configured schedule."""
    if hyper.schedule == LrSchedule.CONSTANT or total_steps <= 1:
        return hyper.lr
    progress = min(max(step / (total_steps - 1), 0.0), 1.0)
    return hyper.lr_final + 0.5 * (hyper.lr - hyper.lr_final) * (1.0 + np.cos(np.pi * progress))


def adam_step(
    params: NetworkParams,
    grads: np.ndarray,
    state: AdamState,
    lr: Optional[float] = None,
) -> Tuple[NetworkParams, AdamState]:
    """
    One bias-corrected Adam update.

    :param params: Current parameters
    :param grads: Gradient laid out like params.theta
    :param state: Optimizer state
    :param lr: Step size override (schedule); defaults to state.hyper.lr
    :return: (updated parameters, updated state)
    :raises: NumericalAbort on non-finite gradients
    """
    g = np.asarray(grads, dtype=np.float64).reshape(-1)
    if g.shape != params.theta.shape or state.m.shape != params.theta.shape:
        raise DomainError(
            f"Shape mismatch: theta {params.theta.shape}, grad {g.shape}, moments {state.m.shape}"
        )
    if not np.all(np.isfinite(g)):
        bad = int(np.count_nonzero(~np.isfinite(g)))
        logger.error(f"Non-finite gradient at Adam step {state.step + 1} ({bad} components)")
        raise NumericalAbort(
            f"Non-finite gradient at Adam step {state.step + 1}",
            diagnostic={"step": state.step + 1, "non_finite_components": bad},
        )

    hyper = state.hyper
    step = state.step + 1
    m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * g
    v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * (g * g)
    m_hat = m / (1.0 - hyper.beta1 ** step)
    v_hat = v / (1.0 - hyper.beta2 ** step)
    step_size = hyper.lr if lr is None else lr
    theta = params.theta - step_size * m_hat / (np.sqrt(v_hat) + hyper.eps)
    return params.with_theta(theta), AdamState(m=m, v=v, step=step, hyper=hyper)
