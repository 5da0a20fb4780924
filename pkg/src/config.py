"""Configuration management for the handwriting analysis pipeline."""

import os
from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import AliasChoices, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="GRAPHOCOG_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_format: Literal["json", "text"] = Field(default="text", description="Log format")

    # Storage
    cache_dir: Path = Field(
        default=Path(".graphocog-cache"),
        validation_alias=AliasChoices("GRAPHOCOG_CACHE", "GRAPHOCOG_CACHE_DIR"),
        description="Spectrogram cache directory",
    )
    output_dir: Path = Field(default=Path("reports"), description="Report output directory")

    # Runs
    default_seed: int = Field(default=0, description="Master seed when none is given")
    max_jobs: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        description="Upper bound for parallel fold workers",
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is valid."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v_upper

    @field_validator("max_jobs")
    @classmethod
    def validate_max_jobs(cls, v: int) -> int:
        """At least one worker."""
        return max(1, v)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
