# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/infrastructure/config.py

# Configuration is read from EPLAB_* environment variables (or a .env file).
# It uses Pydantic's BaseSettings for structured configuration management.

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.
    """

    model_config = SettingsConfigDict(
        env_prefix="EPLAB_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    tool_version: str = "0.1.0"
    log_level: str = "INFO"

    # Output and run control (overridable by --out-dir, --seed, --threads)
    out_dir: Path = Path("./eplab_out")
    seed: int = 0
    threads: int = Field(1, ge=1)

    # Numerics
    boundary_tol: float = Field(1e-9, gt=0)
    rel_tol: float = Field(1e-10, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    max_time: float = Field(50.0, gt=0)
    max_steps: int = Field(200_000, gt=0)
    poisson_tol: float = Field(1e-10, gt=0)
    prediction_candidates: int = Field(8, ge=1)


settings = Settings()
