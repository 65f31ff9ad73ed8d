# src/ssvlab/nn/network.py

import logging
from typing import Tuple

import numpy as np

from ssvlab.core.errors import DomainError
from ssvlab.core.rng import SeededRng
from ssvlab.models.network import NetworkParams
from ssvlab.nn import fcn, mlp
from ssvlab.schemas.network import FcnArch, MlpArch

logger = logging.getLogger(__name__)


def _glorot_block(rng: SeededRng, arch: MlpArch) -> np.ndarray:
    sizes = arch.layer_sizes
    blocks = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        W = (2.0 * rng.random((fan_out, fan_in)) - 1.0) * limit
        blocks.append(W.reshape(-1))
        blocks.append(np.zeros(fan_out))
    return np.concatenate(blocks)


def init_params(rng: SeededRng, arch: MlpArch | FcnArch) -> NetworkParams:
    """
    Glorot-uniform weights, zero biases.

    :param rng: Stream to draw from (the init split of the run seed)
    :param arch: Architecture
    :return: Fresh parameters
    """
    if isinstance(arch, MlpArch):
        theta = _glorot_block(rng, arch)
    else:
        theta = np.concatenate([_glorot_block(rng, arch.branch), _glorot_block(rng, arch.trunk), [0.0]])
    logger.debug(f"Initialised {arch.kind} with {theta.size} parameters")
    return NetworkParams(arch=arch, theta=theta)


def mlp_forward(params: NetworkParams, z) -> float:
    """Evaluate an MLP at one input vector."""
    if not isinstance(params.arch, MlpArch):
        raise DomainError("mlp_forward needs MLP parameters")
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    if z.shape[1] != params.arch.input_dim:
        raise DomainError(f"Expected input of dimension {params.arch.input_dim}, got {z.shape[1]}")
    out, _ = mlp.forward(params.arch, params.theta, z)
    return float(out[0, 0])


def fcn_forward(params: NetworkParams, s: float, z) -> float:
    """Evaluate a branch-trunk network at one (s, z) pair."""
    if not isinstance(params.arch, FcnArch):
        raise DomainError("fcn_forward needs FCN parameters")
    z = np.asarray(z, dtype=np.float64).reshape(1, -1)
    if z.shape[1] != params.arch.input_dim:
        raise DomainError(f"Expected trunk input of dimension {params.arch.input_dim}, got {z.shape[1]}")
    out, _ = fcn.forward(params.arch, params.theta, np.array([s]), z)
    return float(out[0])


def _forward(params: NetworkParams, Z: np.ndarray):
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != params.arch.input_dim:
        raise DomainError(f"Expected inputs of shape (B, {params.arch.input_dim}), got {Z.shape}")
    if isinstance(params.arch, MlpArch):
        out, cache = mlp.forward(params.arch, params.theta, Z)
        return out[:, 0], cache
    # Time-like branch input is the last coordinate (t or tau)
    return fcn.forward(params.arch, params.theta, Z[:, -1], Z)


def evaluate(params: NetworkParams, Z) -> np.ndarray:
    """
    Batched prediction on coordinate rows (x.., t) or (xi.., tau).

    For FCN the branch sees the last column.
    """
    out, _ = _forward(params, Z)
    return out


def grad_mse(params: NetworkParams, Z, targets) -> Tuple[float, np.ndarray]:
    """
    Mean squared residual over the batch and its exact gradient.

    :param params: Network parameters
    :param Z: Inputs, shape (B, m)
    :param targets: Targets, shape (B,)
    :return: (loss, gradient laid out like params.theta)
    :raises: DomainError for an empty batch
    """
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    if targets.size == 0:
        raise DomainError("grad_mse needs a nonempty batch")
    out, cache = _forward(params, Z)
    if out.shape[0] != targets.size:
        raise DomainError(f"Got {out.shape[0]} inputs but {targets.size} targets")
    residual = out - targets
    loss = float(np.mean(residual * residual))
    d_out = (2.0 / targets.size) * residual
    if isinstance(params.arch, MlpArch):
        grad = mlp.backward(params.arch, params.theta, cache, d_out[:, None])
    else:
        grad = fcn.backward(params.arch, params.theta, cache, d_out)
    return loss, grad
