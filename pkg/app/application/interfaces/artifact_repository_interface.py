# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================


# eplab/app/application/interfaces/artifact_repository_interface.py


from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Sequence


class ArtifactRepositoryInterface(ABC):
    """
    An abstract base class (interface) for an artifact repository.

    Artifacts are written as bundles: tables and JSON documents are staged
    and become visible together when the bundle is committed. Nothing of an
    uncommitted bundle is left behind.
    """

    @abstractmethod
    def begin(self) -> None:
        """Starts a new, empty bundle."""
        pass

    @abstractmethod
    def add_table(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
        """Stages a CSV table."""
        pass

    @abstractmethod
    def add_json(self, name: str, document: Dict[str, Any]) -> None:
        """Stages a JSON document."""
        pass

    @abstractmethod
    def staged_names(self) -> List[str]:
        """Names of the files staged so far, in insertion order."""
        pass

    @abstractmethod
    def commit(self) -> List[Path]:
        """Writes the staged bundle atomically and returns the final paths."""
        pass
