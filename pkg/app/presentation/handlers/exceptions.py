# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/presentation/handlers/exceptions.py

"""
Centralized exception handlers for the application.
"""

import logging
import sys

from app.domain.exceptions import (
    ArtifactWriteError,
    NumericalError,
    RepositoryError,
    ValidationError,
)
from app.presentation.router import CommandLineApp

# Set up a logger for the application
logger = logging.getLogger("eplab")

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_WRITE_FAILURE = 3
EXIT_NUMERICAL_FAILURE = 4


def _report(exc: Exception) -> None:
    print(f"error: {exc}", file=sys.stderr)


def register_exception_handlers(app: CommandLineApp):

    # Bad arguments, configs, vacuum states, non-attractive forcing
    @app.exception_handler(ValidationError)
    def validation_error_handler(exc: ValidationError) -> int:
        logger.error(f"Invalid input: {exc}")
        _report(exc)
        return EXIT_INVALID_INPUT

    @app.exception_handler(ArtifactWriteError)
    def artifact_write_error_handler(exc: ArtifactWriteError) -> int:
        logger.error(f"Output could not be written: {exc}")
        _report(exc)
        return EXIT_WRITE_FAILURE

    @app.exception_handler(RepositoryError)
    def repository_error_handler(exc: RepositoryError) -> int:
        _report(exc)
        return EXIT_WRITE_FAILURE

    @app.exception_handler(NumericalError)
    def numerical_error_handler(exc: NumericalError) -> int:
        logger.error(f"Numerical failure: {exc}")
        _report(exc)
        return EXIT_NUMERICAL_FAILURE
