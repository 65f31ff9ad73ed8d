# src/ssvlab/core/errors.py

from typing import Any, Dict, Optional


class SsvlabError(Exception):
    """Base error carrying the process exit code the CLI should return."""

    exit_code: int = 1

    def __init__(self, message: str, diagnostic: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.diagnostic = diagnostic or {}


class ConfigError(SsvlabError):
    """Invalid or inconsistent configuration."""

    exit_code = 2


class MissingArtifactError(SsvlabError):
    """A reference file, checkpoint or metric file the command needs is absent."""

    exit_code = 3


class ArtifactFormatError(MissingArtifactError):
    """An artifact exists but is truncated or malformed, so no usable copy is available."""


class NumericalAbort(SsvlabError):
    """Solver or training run stopped on a non-finite value or a stability violation."""

    exit_code = 4


class DomainError(ValueError):
    """Precondition violation in a library call (bad radius, out-of-grid point, ...)."""
