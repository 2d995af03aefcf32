# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/entities/manifest.py

from typing import List

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    """
    Record of a command run: which command, which configuration digest,
    which tool version, and the files it produced.
    """
    command: str
    config_digest: str = Field(..., description="sha256 of the canonical configuration JSON.")
    tool_version: str
    outputs: List[str] = Field(default_factory=list)
