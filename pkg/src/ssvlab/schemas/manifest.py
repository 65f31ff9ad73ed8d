# src/ssvlab/schemas/manifest.py

from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field


class CommandTag(str, Enum):
    SOLVE = "solve"
    TRAIN = "train"
    EVAL = "eval"
    REPRODUCE = "reproduce"


class RunStatus(str, Enum):
    COMPLETED = "completed"
    ERROR = "error"


class RunManifest(BaseModel):
    """Everything needed to re-run a command: config snapshot, seed, artifacts, timings."""

    model_config = ConfigDict(extra="forbid")

    command: CommandTag
    config: Dict[str, Any]
    seed: int
    code_version: str
    # Artifact role -> path relative to the run directory
    artifacts: Dict[str, str] = {}
    # Artifact role -> sha256 of the file contents
    digests: Dict[str, str] = {}
    # Phase name -> wall-clock seconds
    timings: Dict[str, float] = {}
    figure: Optional[str] = None
    status: RunStatus = RunStatus.COMPLETED
    error: Optional[str] = None
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))


class OrderingReport(BaseModel):
    """Seed-aggregated comparison of the two heads for one (system, arch) pair."""

    model_config = ConfigDict(ser_json_inf_nan="constants")

    label: str
    seeds: int
    times: list[float]
    median_phys: list[float]
    median_ssv: list[float]
    time_avg_phys: float
    time_avg_ssv: float
    ratio: float
    ssv_below_phys_for_t_ge_1: bool
    peaks_phys: Optional[int] = None
    peaks_ssv: Optional[int] = None
    peaks_reference: Optional[int] = None


class PeakCounts(BaseModel):
    """Local maxima per triptych panel at one snapshot time."""

    reference: int = Field(..., ge=0)
    phys: int = Field(..., ge=0)
    ssv: int = Field(..., ge=0)


class PeaksReport(BaseModel):
    """peaks.json: snapshot time (formatted with :g) -> peak counts."""

    model_config = ConfigDict(extra="forbid")

    counts: Dict[str, PeakCounts] = {}

    @staticmethod
    def key(t: float) -> str:
        return f"{t:g}"

    def at(self, t: float) -> Optional[PeakCounts]:
        return self.counts.get(self.key(t))
