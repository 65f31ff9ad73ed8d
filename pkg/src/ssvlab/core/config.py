# src/ssvlab/core/config.py

from pathlib import Path
from typing import Dict, Optional

from dotenv import dotenv_values
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ssvlab import __version__
from ssvlab.core.errors import ConfigError


class Settings(BaseSettings):
    """Process-level configuration loaded from environment (prefix SSVLAB_)."""

    model_config = SettingsConfigDict(
        env_prefix="SSVLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False
    )

    # Worker parallelism cap (sweeps, batch-parallel evaluation)
    THREADS: int = Field(1)

    # Logging
    LOG_LEVEL: str = Field("INFO")

    # Root for timestamped run directories
    OUTPUT_DIR: str = Field("runs")

    # Recorded in every run manifest
    CODE_VERSION: str = Field(__version__)

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v):
        if v < 1:
            raise ValueError("SSVLAB_THREADS must be at least 1")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level: {v}")
        return v


def read_config_file(path: str) -> Dict[str, Optional[str]]:
    """
    Read a flat KEY=VALUE experiment file.

    Blank values are dropped so that schema defaults apply; key case is normalised by the schema.

    :param path: Path to the config file
    :return: Raw string mapping ready for schema validation
    :raises: ConfigError if the file is missing or empty
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"Config file not found: {path}")

    raw = dotenv_values(config_path)
    values = {key.strip(): value for key, value in raw.items() if value not in (None, "")}
    if not values:
        raise ConfigError(f"Config file {path} has no KEY=VALUE entries")
    return values


# Global settings instance
settings = Settings()
