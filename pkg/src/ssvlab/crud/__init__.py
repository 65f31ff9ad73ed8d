"""Artifact persistence: field series, checkpoints and reports."""

from .checkpoints import read_checkpoint, write_checkpoint
from .fields import read_series, write_series
from .reports import (
    read_loss_csv,
    read_manifest,
    read_metric_csv,
    read_ordering,
    read_peaks,
    read_pgm,
    write_curves_csv,
    write_loss_csv,
    write_manifest,
    write_metric_csv,
    write_ordering,
    write_peaks,
    write_pgm,
)

__all__ = [
    "read_checkpoint",
    "write_checkpoint",
    "read_series",
    "write_series",
    "read_loss_csv",
    "read_manifest",
    "read_metric_csv",
    "read_ordering",
    "read_peaks",
    "read_pgm",
    "write_curves_csv",
    "write_loss_csv",
    "write_manifest",
    "write_metric_csv",
    "write_ordering",
    "write_peaks",
    "write_pgm",
]
