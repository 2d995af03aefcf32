# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/infrastructure/repositories/csv_artifact_repository.py


import csv
import io
import json
import logging
import math
import os
import shutil
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.application.interfaces.artifact_repository_interface import ArtifactRepositoryInterface
from app.domain.exceptions import ArtifactWriteError, RepositoryError

# Set up logging
logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(value), ".17g")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Path):
        return str(value)
    return value


class CsvArtifactRepository(ArtifactRepositoryInterface):
    """
    Repository that writes artifact bundles (CSV tables, JSON documents) to a directory.

    Files are rendered in memory, written to a hidden staging directory
    inside the output directory and moved into place with os.replace once
    every file of the bundle has been written.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self._staged: List[Tuple[str, str]] = []

    def begin(self) -> None:
        self._staged = []

    def _stage(self, name: str, content: str) -> None:
        if os.sep in name or name.startswith("."):
            raise RepositoryError(f"Invalid artifact name '{name}'.")
        self._staged.append((name, content))

    def add_table(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> None:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        self._stage(name, buffer.getvalue())

    def add_json(self, name: str, document: Dict[str, Any]) -> None:
        text = json.dumps(to_jsonable(document), indent=2, sort_keys=True, allow_nan=False)
        self._stage(name, text + "\n")

    def staged_names(self) -> List[str]:
        return [name for name, _ in self._staged]

    def commit(self) -> List[Path]:
        """
        Writes the staged bundle.

        Files of an earlier bundle with the same names are kept in the staging
        directory until every new file is in place, and are put back if a move
        fails, so out_dir ends up holding either the new bundle or the old one.

        Raises:
            ArtifactWriteError: If the output directory cannot be created or
                written. No bundle file is left behind in that case.
        """
        staging: Optional[Path] = None
        placed: List[str] = []
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            staging = Path(tempfile.mkdtemp(prefix=".eplab-staging-", dir=self.out_dir))
            for name, content in self._staged:
                with open(staging / name, "w", encoding="utf-8", newline="") as handle:
                    handle.write(content)
            for name, _ in self._staged:
                target = self.out_dir / name
                if target.exists():
                    os.replace(target, staging / f".prev-{name}")
                placed.append(name)
                os.replace(staging / name, target)
        except OSError as e:
            logger.error(f"Writing artifacts to '{self.out_dir}' failed: {e}")
            if staging is not None:
                self._roll_back(staging, placed)
            raise ArtifactWriteError(f"Cannot write artifacts to '{self.out_dir}': {e}") from e
        finally:
            if staging is not None:
                shutil.rmtree(staging, ignore_errors=True)
            self._staged = []

        logger.info(f"Wrote {len(placed)} file(s) to '{self.out_dir}'.")
        return [self.out_dir / name for name in placed]

    def _roll_back(self, staging: Path, placed: List[str]) -> None:
        for name in reversed(placed):
            target = self.out_dir / name
            backup = staging / f".prev-{name}"
            try:
                if backup.exists():
                    os.replace(backup, target)
                elif not (staging / name).exists():
                    # moved in by this commit, with nothing to restore
                    target.unlink(missing_ok=True)
            except OSError as e:
                logger.error(f"Rolling back '{target}' failed: {e}")
