# src/ssvlab/nn/mlp.py
"""Batched MLP forward pass and hand-written reverse mode."""

from typing import List, Tuple

import numpy as np
from scipy.special import expit

from ssvlab.core.errors import DomainError
from ssvlab.schemas.network import Activation, MlpArch


def activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    if kind == Activation.TANH:
        return np.tanh(z)
    if kind == Activation.SIN:
        return np.sin(z)
    if kind == Activation.SOFTPLUS:
        return np.logaddexp(0.0, z)
    raise DomainError(f"Unknown activation: {kind}")


def activate_grad(kind: Activation, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Derivative of the activation given pre-activation z and output a."""
    if kind == Activation.TANH:
        return 1.0 - a * a
    if kind == Activation.SIN:
        return np.cos(z)
    if kind == Activation.SOFTPLUS:
        return expit(z)
    raise DomainError(f"Unknown activation: {kind}")


def unpack(arch: MlpArch, theta: np.ndarray) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Split a flat vector into per-layer (W, b) views."""
    sizes = arch.layer_sizes
    layers = []
    offset = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = theta[offset:offset + fan_out * fan_in].reshape(fan_out, fan_in)
        offset += fan_out * fan_in
        b = theta[offset:offset + fan_out]
        offset += fan_out
        layers.append((W, b))
    return layers


def forward(arch: MlpArch, theta: np.ndarray, Z: np.ndarray):
    """
    Evaluate the network on a batch.

    :param arch: Architecture
    :param theta: Flat parameters
    :param Z: Inputs, shape (B, input_dim)
    :return: (outputs of shape (B, output_dim), cache for backward)
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != arch.input_dim:
        raise DomainError(f"MLP expects inputs of shape (B, {arch.input_dim}), got {Z.shape}")
    layers = unpack(arch, theta)
    h = Z
    cache = [(h, None)]
    for index, (W, b) in enumerate(layers):
        z = h @ W.T + b
        if index < len(layers) - 1:
            h = activate(arch.activation, z)
            cache.append((h, z))
        else:
            h = z
    return h, cache


def backward(arch: MlpArch, theta: np.ndarray, cache, d_out: np.ndarray) -> np.ndarray:
    """
    Reverse-mode pass: gradient of sum(d_out * outputs) with respect to theta.

    :param d_out: Upstream gradient, shape (B, output_dim)
    :return: Flat gradient laid out like theta
    """
    layers = unpack(arch, theta)
    grads = []
    delta = d_out
    for index in range(len(layers) - 1, -1, -1):
        W, _ = layers[index]
        h_prev, _ = cache[index]
        grads.append((delta.T @ h_prev, delta.sum(axis=0)))
        if index > 0:
            h, z = cache[index]
            delta = (delta @ W) * activate_grad(arch.activation, z, h)
    flat = []
    for dW, db in reversed(grads):
        flat.append(dW.reshape(-1))
        flat.append(db)
    return np.concatenate(flat)
