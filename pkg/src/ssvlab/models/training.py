# src/ssvlab/models/training.py

from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ssvlab.models.network import AdamState, NetworkParams
from ssvlab.schemas.experiment import HeadTag, SystemTag

# Relative tolerance for the coordinate identities of a batch
IDENTITY_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class PairedBatch(BaseModel):
    """
    M matched training records in both coordinate systems.

    Per record: x = sqrt(t+1) xi, t = e^tau - 1 and the amplitude map links the targets.
    Spatial arrays have shape (M, d), times and targets shape (M,).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    system: SystemTag
    xi: np.ndarray
    tau: np.ndarray
    x: np.ndarray
    t: np.ndarray
    target_ssv: np.ndarray
    target_phys: np.ndarray
    # Digest of the raw uniforms behind this batch
    draw_digest: str = ""

    @model_validator(mode="after")
    def check_identities(self):
        xi = np.asarray(self.xi, dtype=np.float64)
        x = np.asarray(self.x, dtype=np.float64)
        if xi.ndim == 1:
            xi = xi[:, None]
        if x.ndim == 1:
            x = x[:, None]
        tau = np.asarray(self.tau, dtype=np.float64).reshape(-1)
        t = np.asarray(self.t, dtype=np.float64).reshape(-1)
        target_ssv = np.asarray(self.target_ssv, dtype=np.float64).reshape(-1)
        target_phys = np.asarray(self.target_phys, dtype=np.float64).reshape(-1)
        m = tau.size
        if not (xi.shape[0] == x.shape[0] == t.size == target_ssv.size == target_phys.size == m):
            raise ValueError("PairedBatch arrays disagree on the record count")
        if xi.shape != x.shape:
            raise ValueError(f"xi {xi.shape} and x {x.shape} differ in shape")

        scale = np.sqrt(t + 1.0)[:, None]
        if not np.allclose(x, scale * xi, rtol=IDENTITY_RTOL, atol=IDENTITY_RTOL):
            raise ValueError("PairedBatch violates x = sqrt(t+1) xi")
        if not np.allclose(t, np.expm1(tau), rtol=IDENTITY_RTOL, atol=IDENTITY_RTOL):
            raise ValueError("PairedBatch violates t = exp(tau) - 1")
        factor = t + 1.0 if self.system == SystemTag.NS2D else np.sqrt(t + 1.0)
        if not np.allclose(target_ssv, factor * target_phys, rtol=IDENTITY_RTOL, atol=0.0):
            raise ValueError("PairedBatch violates the amplitude map between targets")

        for name, value in (
            ("xi", xi), ("x", x), ("tau", tau), ("t", t),
            ("target_ssv", target_ssv), ("target_phys", target_phys),
        ):
            object.__setattr__(self, name, _frozen(value))
        return self

    def __len__(self) -> int:
        return int(self.t.size)

    def inputs(self, head: HeadTag) -> np.ndarray:
        """Network inputs, time-like coordinate last: (x.., t) or (xi.., tau)."""
        if head == HeadTag.PHYS:
            return np.column_stack([self.x, self.t])
        return np.column_stack([self.xi, self.tau])

    def targets(self, head: HeadTag) -> np.ndarray:
        return self.target_phys if head == HeadTag.PHYS else self.target_ssv


class TrainedHead(BaseModel):
    """Result of one training run: parameters, optimizer state and loss history."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    head: HeadTag
    system: SystemTag
    params: NetworkParams
    adam: AdamState
    # Rows of (step, loss)
    loss_history: np.ndarray = Field(default_factory=lambda: np.zeros((0, 2)))
    draw_digests: List[str] = []
    # ExperimentConfig.hyperparameters() of the run that produced this head
    hyperparameters: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_history(self):
        history = np.asarray(self.loss_history, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(history)):
            raise ValueError("Loss history must be finite")
        if np.any(history[:, 1] < 0):
            raise ValueError("Loss values must be non-negative")
        object.__setattr__(self, "loss_history", _frozen(history))
        return self

    @property
    def final_loss(self) -> float:
        if self.loss_history.shape[0] == 0:
            return float("nan")
        return float(self.loss_history[-1, 1])
