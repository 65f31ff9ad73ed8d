# src/ssvlab/nn/fcn.py
"""Factorized branch-trunk network N(s, z) = b + sum_k B_k(s) T_k(z)."""

from typing import Tuple

import numpy as np

from ssvlab.core.errors import DomainError
from ssvlab.nn import mlp
from ssvlab.schemas.network import FcnArch


def split(arch: FcnArch, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Branch block, trunk block and the scalar output bias."""
    nb = arch.branch.param_count
    nt = arch.trunk.param_count
    return theta[:nb], theta[nb:nb + nt], float(theta[nb + nt])


def forward(arch: FcnArch, theta: np.ndarray, S: np.ndarray, Z: np.ndarray):
    """
    :param S: Time-like inputs, shape (B,) or (B, 1)
    :param Z: Space-time inputs, shape (B, m)
    :return: (outputs of shape (B,), cache)
    """
    S = np.asarray(S, dtype=np.float64).reshape(-1, 1)
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != S.shape[0]:
        raise DomainError(f"FCN batch mismatch: s has {S.shape[0]} rows, z has shape {Z.shape}")
    theta_b, theta_t, bias = split(arch, theta)
    branch_out, branch_cache = mlp.forward(arch.branch, theta_b, S)
    trunk_out, trunk_cache = mlp.forward(arch.trunk, theta_t, Z)
    y = bias + np.sum(branch_out * trunk_out, axis=1)
    return y, (branch_out, branch_cache, trunk_out, trunk_cache)


def backward(arch: FcnArch, theta: np.ndarray, cache, d_out: np.ndarray) -> np.ndarray:
    """Gradient of sum(d_out * outputs) with respect to theta; d_out has shape (B,)."""
    theta_b, theta_t, _ = split(arch, theta)
    branch_out, branch_cache, trunk_out, trunk_cache = cache
    d = np.asarray(d_out, dtype=np.float64).reshape(-1, 1)
    grad_b = mlp.backward(arch.branch, theta_b, branch_cache, d * trunk_out)
    grad_t = mlp.backward(arch.trunk, theta_t, trunk_cache, d * branch_out)
    return np.concatenate([grad_b, grad_t, [d.sum()]])
