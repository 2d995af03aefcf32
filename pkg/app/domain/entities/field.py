# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/entities/field.py

"""
Entities of the periodic one-dimensional Euler-Poisson solver.
"""
import math
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.entities.phase import Classification
from app.domain.exceptions import InvalidParametersError, ShapeError


class Grid1D(BaseModel):
    """
    Uniform periodic grid on [0, length). Cell i is centred at x_i = i * dx.
    """
    model_config = ConfigDict(frozen=True)

    cells: int = Field(..., ge=16)
    length: float = Field(2.0 * math.pi, gt=0)

    @property
    def dx(self) -> float:
        return self.length / self.cells

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.cells) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers of the real FFT of a grid function."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.cells, d=self.dx)


class FieldState1D(BaseModel):
    """
    Density and velocity at the cell centres at time t.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rho: np.ndarray
    u: np.ndarray
    t: float = 0.0

    @model_validator(mode="after")
    def _check_fields(self) -> "FieldState1D":
        if self.rho.shape != self.u.shape or self.rho.ndim != 1:
            raise ShapeError(
                f"rho and u must be 1D arrays of equal length, got {self.rho.shape} and {self.u.shape}.")
        return self


class InitialDataSpec(BaseModel):
    """
    Member of the built-in initial-data library.

    - uniform:        rho = 1, u = 0
    - density_cosine: rho = 1 + A cos(2 pi m x / L), u = 0
    - velocity_sine:  rho = 1, u = -A sin(2 pi m x / L)
    - separatrix:     rho = 1 + A cos(2 pi m x / L), u_x = rho - 1 exactly
    """
    kind: Literal["uniform", "density_cosine",
                  "velocity_sine", "separatrix"] = "density_cosine"
    amplitude: float = Field(0.5, ge=0)
    mode: int = Field(1, ge=1)
    density_offset: float = 0.0


class SimControls(BaseModel):
    model_config = ConfigDict(frozen=True)

    cfl: float = Field(0.4, gt=0, le=0.5)
    max_time: float = Field(10.0, gt=0)
    rho_threshold: float = 1e3
    ux_threshold: float = -1e3
    scheme: Literal["fv1", "ssp2"] = "fv1"
    deriv: Literal["spectral", "centered"] = "spectral"
    dt_max: float = Field(1e-2, gt=0)
    eps_u: float = Field(1e-12, gt=0)
    mass_tol: float = Field(1e-12, gt=0)
    max_steps: int = Field(1_000_000, gt=0)

    @model_validator(mode="after")
    def _check_thresholds(self) -> "SimControls":
        if not self.rho_threshold > 1:
            raise InvalidParametersError("rho_threshold must exceed 1.")
        if not self.ux_threshold < 0:
            raise InvalidParametersError("ux_threshold must be negative.")
        return self


class SimOutcome(str, Enum):
    BLOWUP_DETECTED = "BlowupDetected"
    RAN_TO_MAX_TIME = "RanToMaxTime"
    NUMERICAL_FAILURE = "NumericalFailure"


class SimResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    outcome: SimOutcome
    t_detect: Optional[float] = None
    max_rho_history: List[Tuple[float, float]] = Field(default_factory=list)
    min_ux_history: List[Tuple[float, float]] = Field(default_factory=list)
    final_state: Optional[FieldState1D] = None
    steps: int = 0
    failure: Optional[str] = None


class BlowupPrediction(BaseModel):
    """
    Per-cell classification of initial data and the predicted blow-up time.
    `t_ode` holds the exact 1D majorant time to the detection threshold per cell.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x: np.ndarray
    d0: np.ndarray
    rho0: np.ndarray
    classifications: List[Classification]
    t_ode: np.ndarray
    t_pred: Optional[float] = None
    critical_cell: Optional[int] = None


class CharacteristicTrace(BaseModel):
    """
    Values (u_x, rho) sampled along numerically traced particle paths.
    Arrays are indexed [time, particle].
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray
    positions: np.ndarray
    d: np.ndarray
    rho: np.ndarray
