# src/ssvlab/services/training_service.py
"""
Paired sampling and the twin training loops for the physical and SSV heads.

Both heads re-derive their sample stream from the same seed, so at every step
they see the same underlying (xi, tau) draws in their own coordinates.
"""

import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ssvlab.core.config import settings
from ssvlab.core.errors import DomainError, NumericalAbort, SsvlabError
from ssvlab.core.grids import Grid1D
from ssvlab.core.interpolation import sample_space_time
from ssvlab.core.rng import INIT_STREAM, SAMPLING_STREAM, SeededRng, sample_uniform_disk, sample_uniform_interval
from ssvlab.models.fields import FieldSeries
from ssvlab.models.metrics import MetricSeries
from ssvlab.models.network import AdamState
from ssvlab.models.training import PairedBatch, TrainedHead
from ssvlab.nn import adam_step, build_adam_hyper, build_arch, grad_mse, init_params, scheduled_lr
from ssvlab.schemas.experiment import EvalGridSpec, ExperimentConfig, HeadTag, SystemTag, TargetSource, TimeSampling
from ssvlab.schemas.network import ArchTag
from ssvlab.services.eval_service import extrapolation_sweep
from ssvlab.services.solvers.burgers import solve_burgers_cole_hopf
from ssvlab.services.transforms import (
    burgers_amp_phys_to_ssv,
    ns_amp_phys_to_ssv,
    phys_to_ssv_arrays,
    ssv_to_phys_arrays,
    ssv_window_radius,
)
from ssvlab.utils.hashing import digest_arrays
from ssvlab.utils.parallel import thread_map

logger = logging.getLogger(__name__)


def _check_coverage(cfg: ExperimentConfig, reference: FieldSeries) -> None:
    tol = 1e-12 * max(1.0, reference.t_last)
    if cfg.t_min < reference.t_first - tol or cfg.t_max > reference.t_last + tol:
        raise DomainError(
            f"Reference covers [{reference.t_first}, {reference.t_last}], "
            f"training window is [{cfg.t_min}, {cfg.t_max}]"
        )


def _draw_times(rng: SeededRng, cfg: ExperimentConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Raw time draws (tau or t, per time_sampling) and the matching tau."""
    if cfg.time_sampling == TimeSampling.LOG_UNIFORM:
        tau = sample_uniform_interval(rng, np.log1p(cfg.t_min), np.log1p(cfg.t_max), cfg.batch)
        return tau, tau
    t = sample_uniform_interval(rng, cfg.t_min, cfg.t_max, cfg.batch)
    return t, np.log1p(t)


def sample_paired_batch_ns(rng: SeededRng, cfg: ExperimentConfig, reference: FieldSeries) -> PairedBatch:
    """
    M records with xi uniform on D_C and tau on the (log) training window.

    Physical points come from the inverse map; targets from space-time
    interpolation of the reference, then the amplitude map.

    :raises: DomainError if a physical point leaves the reference grid
    """
    _check_coverage(cfg, reference)
    raw_times, tau = _draw_times(rng, cfg)
    xi = sample_uniform_disk(rng, cfg.C, cfg.batch)
    x, t = ssv_to_phys_arrays(xi, tau)
    target_phys = sample_space_time(reference, x, t)
    return PairedBatch(
        system=SystemTag.NS2D,
        xi=xi,
        tau=tau,
        x=x,
        t=t,
        target_ssv=ns_amp_phys_to_ssv(target_phys, t),
        target_phys=target_phys,
        draw_digest=digest_arrays(raw_times, xi),
    )


def _window_node_range(grid: Grid1D, radius: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """First and one-past-last node index inside [-radius, radius]."""
    nodes = grid.nodes()
    if np.any(radius > min(-grid.x_min, grid.x_max) + 1e-12):
        raise DomainError(
            f"Training window of radius {float(radius.max()):.4g} exceeds the reference grid "
            f"[{grid.x_min}, {grid.x_max}]"
        )
    lo = np.searchsorted(nodes, -radius - 1e-12, side="left")
    hi = np.searchsorted(nodes, radius + 1e-12, side="right")
    return lo, hi


def sample_batch_burgers(rng: SeededRng, cfg: ExperimentConfig, reference: FieldSeries) -> PairedBatch:
    """
    M records with t on the training window and x a uniformly drawn grid node of I_(t,C).

    Targets come from the reference series, or from the closed-form solution when
    target_source is cole_hopf.
    """
    _check_coverage(cfg, reference)
    grid = reference.grid
    if not isinstance(grid, Grid1D):
        raise DomainError("Burgers sampling needs a 1D reference series")
    raw_times, tau = _draw_times(rng, cfg)
    t = np.expm1(tau) if cfg.time_sampling == TimeSampling.LOG_UNIFORM else raw_times
    # One uniform per record picks the node
    u = rng.random(cfg.batch)
    lo, hi = _window_node_range(grid, ssv_window_radius(cfg.C, t))
    index = np.minimum(lo + np.floor(u * (hi - lo)).astype(np.int64), hi - 1)
    x = grid.nodes()[index]

    if cfg.target_source == TargetSource.COLE_HOPF:
        target_phys = np.asarray(solve_burgers_cole_hopf(x, t), dtype=np.float64)
    else:
        target_phys = sample_space_time(reference, x, t)
    xi, tau = phys_to_ssv_arrays(x, t)
    return PairedBatch(
        system=SystemTag.BURGERS,
        xi=xi[:, None],
        tau=tau,
        x=x[:, None],
        t=t,
        target_ssv=burgers_amp_phys_to_ssv(target_phys, t),
        target_phys=target_phys,
        draw_digest=digest_arrays(raw_times, u),
    )


def batch_sampler(cfg: ExperimentConfig) -> Callable[[SeededRng, ExperimentConfig, FieldSeries], PairedBatch]:
    if cfg.system == SystemTag.NS2D:
        return sample_paired_batch_ns
    return sample_batch_burgers


def _save_nan_batch(path: Path, batch: PairedBatch, step: int) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        path,
        step=step,
        xi=batch.xi,
        tau=batch.tau,
        x=batch.x,
        t=batch.t,
        target_ssv=batch.target_ssv,
        target_phys=batch.target_phys,
    )
    logger.error(f"Offending batch saved to {path}")


class ComparisonResult(BaseModel):
    """Both heads of one comparison and their extrapolation curves."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    phys: TrainedHead
    ssv: TrainedHead
    phys_metrics: MetricSeries
    ssv_metrics: MetricSeries


class TrainingService:
    """Runs training heads and paired comparisons"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads or settings.THREADS

    def train_head(
        self,
        head: HeadTag,
        arch_tag: ArchTag,
        cfg: ExperimentConfig,
        reference: FieldSeries,
        nan_dump_dir: Optional[Path] = None,
    ) -> TrainedHead:
        """
        Train one head for cfg.steps Adam steps on fresh paired batches.

        :param head: phys (inputs (x.., t)) or ssv (inputs (xi.., tau))
        :param arch_tag: mlp or fcn; sizes come from cfg width/depth/latent
        :param cfg: Experiment config shared by both heads
        :param reference: Reference series the targets are drawn from
        :param nan_dump_dir: Where a NaN-loss batch is written (nan_batch.npz)
        :return: Final parameters, optimizer state and loss history
        :raises: NumericalAbort on a non-finite loss
        """
        arch = build_arch(arch_tag, cfg.input_dim, width=cfg.width, depth=cfg.depth, latent=cfg.latent)
        params = init_params(SeededRng.for_stream(cfg.seed, INIT_STREAM), arch)
        hyper = build_adam_hyper(cfg.lr, cfg.lr_final)
        state = AdamState.fresh(arch.param_count, hyper)
        rng = SeededRng.for_stream(cfg.seed, SAMPLING_STREAM)
        sample = batch_sampler(cfg)

        history: List[Tuple[int, float]] = []
        digests: List[str] = []
        logger.info(
            f"Training {head.value} head: {cfg.system.value}/{arch_tag.value}, "
            f"{arch.param_count} parameters, {cfg.steps} steps, batch {cfg.batch}"
        )

        for step in range(cfg.steps):
            batch = sample(rng, cfg, reference)
            digests.append(batch.draw_digest)
            loss, grad = grad_mse(params, batch.inputs(head), batch.targets(head))
            if not np.isfinite(loss):
                logger.error(f"Non-finite loss in {head.value} head at step {step}")
                dump = None
                if nan_dump_dir is not None:
                    dump = Path(nan_dump_dir) / "nan_batch.npz"
                    _save_nan_batch(dump, batch, step)
                raise NumericalAbort(
                    f"Non-finite loss in {head.value} head at step {step}",
                    diagnostic={"head": head.value, "step": step, "batch_path": str(dump) if dump else None},
                )
            lr = scheduled_lr(hyper, step, cfg.steps)
            params, state = adam_step(params, grad, state, lr=lr)

            if step % cfg.record_every == 0 or step == cfg.steps - 1:
                history.append((step, loss))
                logger.info(f"[{head.value}] step {step}/{cfg.steps} loss={loss:.4e} lr={lr:.2e}")

        return TrainedHead(
            head=head,
            system=cfg.system,
            params=params,
            adam=state,
            loss_history=np.array(history, dtype=np.float64).reshape(-1, 2),
            draw_digests=digests,
            hyperparameters=cfg.hyperparameters(),
        )

    def train_pair(
        self,
        cfg: ExperimentConfig,
        reference: FieldSeries,
        nan_dump_dir: Optional[Path] = None,
    ) -> Tuple[TrainedHead, TrainedHead]:
        """Both heads under identical settings; concurrently when threads allow."""
        arch_tag = cfg.arch

        def run(head: HeadTag) -> TrainedHead:
            return self.train_head(head, arch_tag, cfg, reference, nan_dump_dir=nan_dump_dir)

        phys, ssv = thread_map(run, [HeadTag.PHYS, HeadTag.SSV], threads=min(self.threads, 2))
        check_parity(phys, ssv)
        return phys, ssv

    def run_comparison(
        self,
        cfg: ExperimentConfig,
        reference: FieldSeries,
        nan_dump_dir: Optional[Path] = None,
    ) -> ComparisonResult:
        """
        Train both heads and evaluate them on the configured extrapolation times.

        :raises: errors of the training and evaluation steps
        """
        phys, ssv = self.train_pair(cfg, reference, nan_dump_dir=nan_dump_dir)
        spec = EvalGridSpec.from_config(cfg)
        label = cfg.label or f"{cfg.system.value}-{cfg.arch.value}"
        phys_metrics = extrapolation_sweep(phys, reference, spec, label=f"{label}-phys", threads=self.threads)
        ssv_metrics = extrapolation_sweep(ssv, reference, spec, label=f"{label}-ssv", threads=self.threads)
        return ComparisonResult(phys=phys, ssv=ssv, phys_metrics=phys_metrics, ssv_metrics=ssv_metrics)


def parity_record(head: TrainedHead) -> Dict[str, Any]:
    """Serialized settings two paired heads must share: experiment hyperparameters, network and optimizer."""
    return {
        "experiment": head.hyperparameters,
        "network": head.params.arch.model_dump(mode="json"),
        "optimizer": head.adam.hyper.model_dump(mode="json"),
    }


def _differing_keys(a: Any, b: Any, prefix: str = "") -> List[str]:
    if isinstance(a, dict) and isinstance(b, dict):
        keys: List[str] = []
        for key in sorted(set(a) | set(b)):
            keys.extend(_differing_keys(a.get(key), b.get(key), f"{prefix}{key}."))
        return keys
    return [] if a == b else [prefix.rstrip(".")]


def check_parity(phys: TrainedHead, ssv: TrainedHead) -> None:
    """Same draw stream and structurally equal serialized settings for both heads."""
    if phys.draw_digests != ssv.draw_digests:
        mismatch = next(
            (i for i, (a, b) in enumerate(zip(phys.draw_digests, ssv.draw_digests)) if a != b),
            min(len(phys.draw_digests), len(ssv.draw_digests)),
        )
        logger.error(f"Sample streams of the two heads diverge at step {mismatch}")
        raise SsvlabError("Paired sample streams differ between heads", diagnostic={"step": mismatch})
    differing = _differing_keys(parity_record(phys), parity_record(ssv))
    if differing:
        logger.error(f"Heads differ in {differing}")
        raise SsvlabError("Heads were trained with different hyperparameters", diagnostic={"keys": differing})


training_service = TrainingService()


def train_head(
    head: HeadTag,
    arch_tag: ArchTag,
    cfg: ExperimentConfig,
    reference: FieldSeries,
    nan_dump_dir: Optional[Path] = None,
) -> TrainedHead:
    return training_service.train_head(head, arch_tag, cfg, reference, nan_dump_dir=nan_dump_dir)


def run_comparison(cfg: ExperimentConfig, reference: FieldSeries, nan_dump_dir: Optional[Path] = None) -> ComparisonResult:
    return training_service.run_comparison(cfg, reference, nan_dump_dir=nan_dump_dir)
