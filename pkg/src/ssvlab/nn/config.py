"""
Default architectures and optimizer settings for the coordinate networks.
"""

from typing import Any, Dict

from ssvlab.schemas.network import Activation, AdamHyper, ArchTag, FcnArch, MlpArch


def get_mlp_config() -> Dict[str, Any]:
    """
    Plain MLP defaults.

    Returns:
        Dictionary with depth, width and activation
    """
    return {
        "depth": 4,
        "width": 128,
        "activation": Activation.TANH,
    }


def get_fcn_config() -> Dict[str, Any]:
    """
    Branch-trunk defaults.

    Returns:
        Dictionary with branch/trunk sizes, latent width and activation
    """
    return {
        "branch_depth": 3,
        "branch_width": 64,
        "trunk_depth": 4,
        "trunk_width": 128,
        "latent": 64,
        "activation": Activation.TANH,
    }


def get_adam_config() -> Dict[str, Any]:
    return {
        "lr": 1e-3,
        "beta1": 0.9,
        "beta2": 0.999,
        "eps": 1e-8,
        "schedule": "cosine",
        "lr_final": 1e-5,
    }


def build_arch(
    tag: ArchTag,
    input_dim: int,
    width: int | None = None,
    depth: int | None = None,
    latent: int | None = None,
    activation: Activation | None = None,
) -> MlpArch | FcnArch:
    """
    Build an architecture from the defaults, with optional overrides.

    For FCN, width/depth override the trunk and the branch keeps half the width
    (at least 1) and one layer fewer (at least 1).
    """
    if tag == ArchTag.MLP:
        cfg = get_mlp_config()
        act = activation or cfg["activation"]
        hidden = [width or cfg["width"]] * (depth or cfg["depth"])
        return MlpArch(input_dim=input_dim, hidden=hidden, activation=act)

    cfg = get_fcn_config()
    act = activation or cfg["activation"]
    k = latent or cfg["latent"]
    trunk_width = width or cfg["trunk_width"]
    trunk_depth = depth or cfg["trunk_depth"]
    branch_width = max(1, trunk_width // 2) if width else cfg["branch_width"]
    branch_depth = max(1, trunk_depth - 1) if depth else cfg["branch_depth"]
    return FcnArch(
        branch=MlpArch(input_dim=1, hidden=[branch_width] * branch_depth, output_dim=k, activation=act),
        trunk=MlpArch(input_dim=input_dim, hidden=[trunk_width] * trunk_depth, output_dim=k, activation=act),
    )


def build_adam_hyper(lr: float | None = None, lr_final: float | None = None) -> AdamHyper:
    cfg = get_adam_config()
    if lr is not None:
        cfg["lr"] = lr
    if lr_final is not None:
        cfg["lr_final"] = lr_final
    return AdamHyper(**cfg)
