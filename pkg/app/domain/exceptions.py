# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/exceptions.py

"""
This module defines the custom, application-specific exceptions for the domain layer.

These exceptions represent violations of the mathematical domain (vacuum states,
non-attractive forcing, ill-posed Poisson problems) and numerical breakdowns.
They are technology-agnostic and contain no details about the presentation layer
(e.g., process exit codes), ensuring a clean separation of concerns.
"""

# ==============================
# Base Application Exception
# ==============================


class ApplicationException(Exception):
    """Base class for all custom exceptions in this application."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


# ==========================================
# Input & Domain Validation Exceptions
# ==========================================


class ValidationError(ApplicationException):
    """Raised when an input violates a precondition of an operation."""
    pass


class DomainError(ValidationError):
    """Raised when an argument lies outside the domain of a formula (e.g. rho < 0)."""
    pass


class VacuumStateError(DomainError):
    """
    Raised when a vacuum state (rho = 0) is passed where a non-vacuum
    state is required. Inherits from DomainError for generic handling.
    """
    pass


class InvalidParametersError(ValidationError):
    """Raised for non-physical parameters (c <= 0, k >= 0) or bad tolerances."""
    pass


class ShapeError(ValidationError):
    """Raised when matrices or grids have inconsistent shapes."""
    pass


class PoissonSolvabilityError(ValidationError):
    """Raised when the periodic Poisson problem is ill-posed (mean density != 1)."""
    pass


class ConfigSchemaError(ValidationError):
    """Raised when a configuration file does not match the expected schema."""
    pass


# ==========================================
# Numerical Exceptions
# ==========================================


class NumericalError(ApplicationException):
    """Base exception for failures of a numerical procedure."""
    pass


class NumericalFailureError(NumericalError):
    """Raised when a simulation produces NaN, negative density or loses mass."""
    pass


class OrderingViolationError(NumericalError):
    """Raised when the comparison ordering is violated beyond tolerance."""

    def __init__(self, message: str, first_time: float):
        self.first_time = first_time
        super().__init__(message)


# =======================================
# Artifact Persistence Exceptions
# =======================================


class RepositoryError(ApplicationException):
    """Base exception for errors originating from the persistence layer."""
    pass


class ArtifactWriteError(RepositoryError):
    """Raised when the output directory cannot be created or written."""
    pass
