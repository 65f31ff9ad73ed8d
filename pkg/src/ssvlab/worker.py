# src/ssvlab/worker.py
"""
Experiment workflows behind the command line: solve, train, eval, reproduce
and the seed-aggregated ordering report.

Every workflow writes a manifest.json into its run directory, also on failure.
"""

import logging
import time
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from ssvlab.core.config import read_config_file, settings
from ssvlab.core.errors import ConfigError, MissingArtifactError
from ssvlab.crud.checkpoints import read_checkpoint, write_checkpoint
from ssvlab.crud.fields import read_series, write_series
from ssvlab.crud.reports import (
    read_metric_csv,
    read_peaks,
    write_curves_csv,
    write_loss_csv,
    write_manifest,
    write_metric_csv,
    write_ordering,
    write_peaks,
    write_pgm,
)
from ssvlab.models.fields import FieldSeries, ScalarFieldSnapshot
from ssvlab.models.metrics import MetricSeries
from ssvlab.models.training import TrainedHead
from ssvlab.nn import build_adam_hyper, build_arch
from ssvlab.schemas.experiment import EvalGridSpec, ExperimentConfig, HeadTag, InitialCondition, SystemTag
from ssvlab.schemas.manifest import CommandTag, OrderingReport, PeakCounts, PeaksReport, RunManifest, RunStatus
from ssvlab.schemas.network import ArchTag
from ssvlab.services.eval_service import (
    count_local_maxima,
    diffusion_wave_distance,
    extrapolation_sweep,
    gaussian_convergence_series,
    largest_window_time,
    seed_median,
    snapshot_triptych,
    time_averaged,
)
from ssvlab.services.profiles import lamb_oseen_exact, ns_initial_two_gaussians
from ssvlab.services.solvers import solve_burgers_reference, solve_ns2d
from ssvlab.services.training_service import training_service
from ssvlab.utils.hashing import digest_file

logger = logging.getLogger(__name__)

REFERENCE_FILE = "reference.ssf"
MANIFEST_FILE = "manifest.json"
PEAKS_FILE = "peaks.json"
ORDERING_FILE = "ordering.json"
ATTRACTOR_FILE = "attractor_distance.csv"
ATTRACTOR_COLUMN = "l2_distance"
# Rows in attractor_distance.csv, at most
ATTRACTOR_ROWS = 51
CHECKPOINT_FILES = {HeadTag.PHYS: "ckpt_phys.ssc", HeadTag.SSV: "ckpt_ssv.ssc"}
LOSS_FILES = {HeadTag.PHYS: "loss_phys.csv", HeadTag.SSV: "loss_ssv.csv"}
METRIC_FILES = {HeadTag.PHYS: "metrics_phys.csv", HeadTag.SSV: "metrics_ssv.csv"}
TRIPTYCH_PANELS = ("reference", "phys", "ssv")
# Local maxima above this fraction of the global maximum count as peaks
PEAK_THRESHOLD = 0.25

# Figure id -> (system, architectures)
FIGURES: Dict[str, Tuple[SystemTag, Tuple[ArchTag, ...]]] = {
    "fig1": (SystemTag.NS2D, (ArchTag.FCN, ArchTag.MLP)),
    "fig2": (SystemTag.NS2D, (ArchTag.FCN,)),
    "fig3": (SystemTag.NS2D, (ArchTag.MLP,)),
    "fig5": (SystemTag.BURGERS, (ArchTag.FCN, ArchTag.MLP)),
    "fig6": (SystemTag.BURGERS, (ArchTag.FCN,)),
    "fig7": (SystemTag.BURGERS, (ArchTag.MLP,)),
}


def load_experiment_config(path: str, seed: Optional[int] = None, **overrides) -> ExperimentConfig:
    """
    Parse and validate a KEY=VALUE experiment file.

    :raises: ConfigError for a missing file or invalid values
    """
    raw = dict(read_config_file(path))
    if seed is not None:
        raw["seed"] = seed
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return _validate_config(raw)


def _validate_config(raw: Dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment config: {e}") from e


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    """Re-validated copy of cfg with some fields replaced."""
    data = cfg.model_dump()
    data.update(changes)
    return _validate_config(data)


def new_run_dir(root: Optional[str], prefix: str) -> Path:
    """Fresh timestamped directory under root (default SSVLAB_OUTPUT_DIR)."""
    base = Path(root or settings.OUTPUT_DIR)
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    run_dir = base / f"{prefix}-{stamp}"
    suffix = 1
    while run_dir.exists():
        run_dir = base / f"{prefix}-{stamp}-{suffix}"
        suffix += 1
    run_dir.mkdir(parents=True)
    return run_dir


class RunRecorder:
    """Collects artifacts and phase timings and writes the run manifest."""

    def __init__(self, command: CommandTag, cfg: ExperimentConfig, run_dir: Path, figure: Optional[str] = None):
        self.command = command
        self.cfg = cfg
        self.run_dir = Path(run_dir)
        self.figure = figure
        self.artifacts: Dict[str, str] = {}
        self.digests: Dict[str, str] = {}
        self.timings: Dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)

    def add(self, role: str, path: Path) -> None:
        self.artifacts[role] = str(Path(path).relative_to(self.run_dir))
        self.digests[role] = digest_file(path)

    def manifest(self, status: RunStatus = RunStatus.COMPLETED, error: Optional[str] = None) -> RunManifest:
        return RunManifest(
            command=self.command,
            config=self.cfg.model_dump(mode="json"),
            seed=self.cfg.seed,
            code_version=settings.CODE_VERSION,
            artifacts=dict(self.artifacts),
            digests=dict(self.digests),
            timings=dict(self.timings),
            figure=self.figure,
            status=status,
            error=error,
        )

    def finish(self) -> RunManifest:
        manifest = self.manifest()
        write_manifest(self.run_dir / MANIFEST_FILE, manifest)
        return manifest

    def fail(self, error: Exception) -> None:
        try:
            write_manifest(self.run_dir / MANIFEST_FILE, self.manifest(RunStatus.ERROR, str(error)))
        except Exception as write_err:
            logger.error(f"Failed to write error manifest: {write_err}")


def initial_snapshot(cfg: ExperimentConfig) -> ScalarFieldSnapshot:
    """Initial vorticity on the solver grid."""
    grid = cfg.solver_config().grid
    X, Y = grid.mesh()
    if cfg.initial == InitialCondition.LAMB_OSEEN:
        values = lamb_oseen_exact(np.stack([X, Y], axis=-1), 0.0)
    else:
        values = ns_initial_two_gaussians(X, Y)
    return ScalarFieldSnapshot(grid=grid, t=0.0, values=values)


def solve_reference(cfg: ExperimentConfig) -> FieldSeries:
    if cfg.system == SystemTag.NS2D:
        return solve_ns2d(initial_snapshot(cfg), cfg.solver_config())
    return solve_burgers_reference(cfg.solver_config())


def reference_path(cfg: ExperimentConfig, run_dir: Path) -> Path:
    return Path(cfg.reference_path) if cfg.reference_path else Path(run_dir) / REFERENCE_FILE


def solve_workflow(cfg: ExperimentConfig, run_dir: Path) -> RunManifest:
    """Compute the reference series and write it as SSF1."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    recorder = RunRecorder(CommandTag.SOLVE, cfg, run_dir)
    try:
        logger.info(f"Starting {cfg.system.value} reference solve into {run_dir}")
        with recorder.phase("solve"):
            series = solve_reference(cfg)
        target = run_dir / REFERENCE_FILE
        with recorder.phase("write"):
            write_series(target, series)
        recorder.add("reference", target)
        logger.info(f"Reference solve completed: {len(series)} snapshots")
        return recorder.finish()

    except Exception as e:
        logger.error(f"Reference solve failed: {e}")
        recorder.fail(e)
        raise


def train_workflow(cfg: ExperimentConfig, run_dir: Path) -> RunManifest:
    """Train both heads on the reference and write checkpoints and loss histories."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    recorder = RunRecorder(CommandTag.TRAIN, cfg, run_dir)
    try:
        reference = read_series(reference_path(cfg, run_dir))
        logger.info(f"Starting training ({cfg.arch.value}, seed {cfg.seed}) into {run_dir}")
        with recorder.phase("train"):
            heads = training_service.train_pair(cfg, reference, nan_dump_dir=run_dir)
        for trained in heads:
            ckpt = write_checkpoint(run_dir / CHECKPOINT_FILES[trained.head], trained.params, trained.adam)
            loss = write_loss_csv(run_dir / LOSS_FILES[trained.head], trained)
            recorder.add(f"checkpoint_{trained.head.value}", ckpt)
            recorder.add(f"loss_{trained.head.value}", loss)
            logger.info(f"{trained.head.value} head final loss {trained.final_loss:.4e}")
        return recorder.finish()

    except Exception as e:
        logger.error(f"Training failed: {e}")
        recorder.fail(e)
        raise


def load_head(cfg: ExperimentConfig, run_dir: Path, head: HeadTag) -> TrainedHead:
    """
    Rebuild a trained head from its checkpoint.

    :raises: MissingArtifactError if absent, ConfigError if the architecture differs from cfg
    """
    params, adam = read_checkpoint(Path(run_dir) / CHECKPOINT_FILES[head], build_adam_hyper(cfg.lr, cfg.lr_final))
    expected = build_arch(cfg.arch, cfg.input_dim, width=cfg.width, depth=cfg.depth, latent=cfg.latent)
    if params.arch != expected:
        raise ConfigError(f"Checkpoint for {head.value} head does not match the configured architecture")
    return TrainedHead(head=head, system=cfg.system, params=params, adam=adam)


def _emit_triptych(
    recorder: RunRecorder,
    panels: Sequence[ScalarFieldSnapshot],
    t: float,
) -> PeakCounts:
    run_dir = recorder.run_dir
    stem = f"triptych_t{t:g}"
    for name, snapshot in zip(TRIPTYCH_PANELS, panels):
        path = write_series(run_dir / f"{stem}_{name}.ssf", FieldSeries.from_snapshots([snapshot]))
        recorder.add(f"{stem}_{name}", path)
    if panels[0].grid.ndim == 2:
        for name, snapshot in zip(TRIPTYCH_PANELS, panels):
            recorder.add(f"{stem}_{name}_pgm", write_pgm(run_dir / f"{stem}_{name}.pgm", snapshot))
    else:
        recorder.add(f"{stem}_curves", write_curves_csv(run_dir / f"{stem}.csv", panels, TRIPTYCH_PANELS))
    counts = {name: count_local_maxima(snapshot, PEAK_THRESHOLD) for name, snapshot in zip(TRIPTYCH_PANELS, panels)}
    return PeakCounts(**counts)


def attractor_distance(cfg: ExperimentConfig, reference: FieldSeries) -> Optional[MetricSeries]:
    """
    Distance of the rescaled reference to its long-time profile on the window of radius C:
    Gamma * G for Navier-Stokes, the diffusion wave of the initial mass for Burgers.

    Snapshots whose window leaves the reference grid are dropped; None if none fit.
    """
    t_fit = min(reference.t_last, largest_window_time(reference.grid, cfg.C))
    if t_fit < reference.times[0]:
        logger.warning(f"Window C={cfg.C} exceeds the reference grid at t={reference.times[0]:g}; no attractor distance")
        return None
    stride = max(1, (len(reference) - 1) // (ATTRACTOR_ROWS - 1))
    label = f"{cfg.label or cfg.system.value}-attractor"
    if cfg.system == SystemTag.NS2D:
        return gaussian_convergence_series(reference, C=cfg.C, stride=stride, t_max=t_fit, label=label)
    return diffusion_wave_distance(reference, C=cfg.C, stride=stride, t_max=t_fit, label=label)


def eval_workflow(cfg: ExperimentConfig, run_dir: Path) -> RunManifest:
    """RelMSE sweeps for both heads, triptych snapshots at the configured times and the attractor distance."""
    run_dir = Path(run_dir)
    recorder = RunRecorder(CommandTag.EVAL, cfg, run_dir)
    try:
        reference = read_series(reference_path(cfg, run_dir))
        phys = load_head(cfg, run_dir, HeadTag.PHYS)
        ssv = load_head(cfg, run_dir, HeadTag.SSV)
        spec = EvalGridSpec.from_config(cfg)
        label = cfg.label or f"{cfg.system.value}-{cfg.arch.value}"

        logger.info(f"Starting evaluation in {run_dir}: {len(spec.times)} sweep times")
        with recorder.phase("sweep"):
            for trained in (phys, ssv):
                metric = extrapolation_sweep(trained, reference, spec, label=f"{label}-{trained.head.value}")
                path = write_metric_csv(run_dir / METRIC_FILES[trained.head], metric)
                recorder.add(f"metrics_{trained.head.value}", path)

        peaks = PeaksReport()
        with recorder.phase("triptych"):
            for t in cfg.triptych_times:
                panels = snapshot_triptych((phys, ssv), reference, t, spec)
                peaks.counts[PeaksReport.key(t)] = _emit_triptych(recorder, panels, t)
        recorder.add("peaks", write_peaks(run_dir / PEAKS_FILE, peaks))

        with recorder.phase("attractor"):
            distance = attractor_distance(cfg, reference)
        if distance is not None:
            path = write_metric_csv(run_dir / ATTRACTOR_FILE, distance, column=ATTRACTOR_COLUMN)
            recorder.add("attractor_distance", path)
        return recorder.finish()

    except Exception as e:
        logger.error(f"Evaluation failed: {e}")
        recorder.fail(e)
        raise


def reproduce_workflow(
    figure: str,
    cfg: Optional[ExperimentConfig] = None,
    seeds: Optional[Sequence[int]] = None,
    out_root: Optional[str] = None,
    seed: Optional[int] = None,
) -> Tuple[Path, RunManifest]:
    """
    One-shot solve, train and eval for a figure into a fresh timestamped directory.

    Layout: reference.ssf at the top, then <arch>/seed<k>/ per architecture and seed,
    and ordering.json across seeds.

    :param seed: Seed override, used when seeds is not given
    :raises: ConfigError for an unknown figure or a config of the wrong system
    """
    if figure not in FIGURES:
        raise ConfigError(f"Unknown figure id {figure!r}; expected one of {sorted(FIGURES)}")
    system, archs = FIGURES[figure]
    if cfg is None:
        cfg = _validate_config({"system": system.value, "seed": seed})
    elif seed is not None:
        cfg = with_overrides(cfg, seed=seed)
    if cfg.system != system:
        raise ConfigError(f"{figure} is a {system.value} figure but the config is for {cfg.system.value}")
    seeds = list(seeds) if seeds else [cfg.seed]

    run_dir = new_run_dir(out_root, figure)
    recorder = RunRecorder(CommandTag.REPRODUCE, cfg, run_dir, figure=figure)
    try:
        logger.info(f"Reproducing {figure} into {run_dir} (archs {[a.value for a in archs]}, seeds {seeds})")
        with recorder.phase("solve"):
            solve_workflow(cfg, run_dir)
        recorder.add("reference", run_dir / REFERENCE_FILE)

        reference_file = str((run_dir / REFERENCE_FILE).resolve())
        seed_dirs: List[Path] = []
        for arch in archs:
            for seed in seeds:
                sub = run_dir / arch.value / f"seed{seed}"
                sub_cfg = with_overrides(cfg, arch=arch, seed=seed, reference_path=reference_file)
                with recorder.phase(f"{arch.value}/seed{seed}"):
                    train_workflow(sub_cfg, sub)
                    eval_workflow(sub_cfg, sub)
                for head in HeadTag:
                    recorder.add(f"{arch.value}_seed{seed}_metrics_{head.value}", sub / METRIC_FILES[head])
                seed_dirs.append(sub)

        ordering = report_ordering(seed_dirs, run_dir / ORDERING_FILE)
        recorder.add("ordering", ordering)
        return run_dir, recorder.finish()

    except Exception as e:
        logger.error(f"Reproduction of {figure} failed: {e}")
        recorder.fail(e)
        raise


def _ordering_entry(label: str, phys_runs: List[MetricSeries], ssv_runs: List[MetricSeries], peaks: List[PeakCounts]) -> OrderingReport:
    median_phys = seed_median(phys_runs, label=f"{label}-phys")
    median_ssv = seed_median(ssv_runs, label=f"{label}-ssv")
    avg_phys = time_averaged(median_phys)
    avg_ssv = time_averaged(median_ssv)
    late = median_phys.times >= 1.0
    below = bool(np.all(median_ssv.values[late] < median_phys.values[late])) if np.any(late) else True

    def median_peak(panel: str) -> Optional[int]:
        counts = [getattr(p, panel) for p in peaks]
        return int(np.round(np.median(counts))) if counts else None

    return OrderingReport(
        label=label,
        seeds=len(phys_runs),
        times=[float(t) for t in median_phys.times],
        median_phys=[float(v) for v in median_phys.values],
        median_ssv=[float(v) for v in median_ssv.values],
        time_avg_phys=avg_phys,
        time_avg_ssv=avg_ssv,
        ratio=avg_phys / avg_ssv if avg_ssv > 0 else float("inf"),
        ssv_below_phys_for_t_ge_1=below,
        peaks_phys=median_peak("phys"),
        peaks_ssv=median_peak("ssv"),
        peaks_reference=median_peak("reference"),
    )


def report_ordering(run_dirs: Sequence[Path], out_path: Path, peak_time: float = 1.5) -> Path:
    """
    Aggregate per-seed metric CSVs into median curves, time averages and the
    SSV-vs-physical ordering, grouped by run label.

    :raises: MissingArtifactError if a run directory lacks its metric CSVs
    """
    groups: Dict[str, Dict[str, List]] = {}
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        phys = read_metric_csv(run_dir / METRIC_FILES[HeadTag.PHYS])
        ssv = read_metric_csv(run_dir / METRIC_FILES[HeadTag.SSV])
        label = phys.label[: -len("-phys")] if phys.label.endswith("-phys") else phys.label
        group = groups.setdefault(label, {"phys": [], "ssv": [], "peaks": []})
        group["phys"].append(phys)
        group["ssv"].append(ssv)
        peaks_file = run_dir / PEAKS_FILE
        if peaks_file.is_file():
            counts = read_peaks(peaks_file).at(peak_time)
            if counts is not None:
                group["peaks"].append(counts)

    if not groups:
        raise MissingArtifactError("No runs to aggregate")
    reports = [_ordering_entry(label, g["phys"], g["ssv"], g["peaks"]) for label, g in sorted(groups.items())]
    for report in reports:
        logger.info(
            f"{report.label}: time-averaged RelMSE phys={report.time_avg_phys:.3e} "
            f"ssv={report.time_avg_ssv:.3e} (ratio {report.ratio:.2f})"
        )
    return write_ordering(out_path, reports)


# Command -> workflow for single-config commands
WORKFLOWS = {
    CommandTag.SOLVE: solve_workflow,
    CommandTag.TRAIN: train_workflow,
    CommandTag.EVAL: eval_workflow,
}


__all__ = [
    "FIGURES",
    "WORKFLOWS",
    "load_experiment_config",
    "new_run_dir",
    "report_ordering",
    "reproduce_workflow",
]
