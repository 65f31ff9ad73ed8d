"""
Coordinate networks (plain MLP and branch-trunk FCN) with reverse-mode
gradients and an Adam optimizer.
"""

from .adam import adam_step, scheduled_lr
from .config import build_adam_hyper, build_arch, get_adam_config, get_fcn_config, get_mlp_config
from .network import evaluate, fcn_forward, grad_mse, init_params, mlp_forward

__all__ = [
    "adam_step",
    "scheduled_lr",
    "build_adam_hyper",
    "build_arch",
    "get_adam_config",
    "get_fcn_config",
    "get_mlp_config",
    "evaluate",
    "fcn_forward",
    "grad_mse",
    "init_params",
    "mlp_forward",
]
