# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/presentation/dependencies.py

from functools import lru_cache
from pathlib import Path
from typing import Optional

from app.application.interfaces.artifact_repository_interface import ArtifactRepositoryInterface
from app.application.services.experiment_service import LabService
from app.infrastructure.config import Settings, settings
from app.infrastructure.repositories.csv_artifact_repository import CsvArtifactRepository


def get_settings(out_dir: Optional[Path] = None, seed: Optional[int] = None,
                 threads: Optional[int] = None) -> Settings:
    """The global settings with command-line overrides applied."""
    overrides = {key: value for key, value in
                 (("out_dir", out_dir), ("seed", seed), ("threads", threads))
                 if value is not None}
    return settings.model_copy(update=overrides)


@lru_cache()
def get_artifact_repository(out_dir: Path) -> ArtifactRepositoryInterface:
    """Provides one artifact repository per output directory."""
    return CsvArtifactRepository(out_dir=out_dir)


def get_lab_service(run_settings: Settings) -> LabService:
    """
    Provides the lab service for a run.

    The service is injected with the repository dependency.
    """
    repository = get_artifact_repository(Path(run_settings.out_dir))
    return LabService(repository=repository, settings=run_settings)
