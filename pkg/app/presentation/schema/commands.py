# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/presentation/schema/commands.py

import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.domain.entities.field import Grid1D, InitialDataSpec, SimControls


class ClassifyRequest(BaseModel):
    """
    Defines the arguments of a single-state classification.
    When either c or k is given, the state is read in physical units.
    """
    d: float
    rho: float
    n: int = Field(..., ge=1)
    c: Optional[float] = None
    k: Optional[float] = None
    tol: float = Field(1e-9, gt=0, description="Boundary band half-width in the margin metric.")

    @property
    def is_physical(self) -> bool:
        return self.c is not None or self.k is not None


class IntegrateRequest(BaseModel):
    d0: float
    rho0: float
    n: int = Field(..., ge=1)
    tol: float = Field(1e-10, gt=0, description="Relative tolerance of the integrator.")
    max_time: float = Field(50.0, gt=0)


class PortraitRequest(BaseModel):
    n: int = Field(2, ge=1)
    rho_max: float = Field(4.0, gt=0)
    d_max: float = Field(4.0, gt=0)
    resolution: int = Field(200, gt=0)
    seeds_file: Optional[Path] = None
    random_seeds: int = Field(0, ge=0)


class SimulationConfig(BaseModel):
    """
    Defines the expected JSON structure of a simulation config.
    """
    model_config = ConfigDict(extra="forbid")

    cells: int = Field(1024, ge=16)
    length: float = Field(2.0 * math.pi, gt=0)
    cfl: float = Field(0.4, gt=0, le=0.5)
    max_time: float = Field(10.0, gt=0)
    rho_threshold: float = 1e3
    ux_threshold: float = -1e3
    scheme: Literal["fv1", "ssp2"] = "fv1"
    deriv: Literal["spectral", "centered"] = "spectral"
    dt_max: float = Field(1e-2, gt=0)
    max_steps: int = Field(1_000_000, gt=0)
    initial: InitialDataSpec = Field(default_factory=InitialDataSpec)

    def grid(self) -> Grid1D:
        return Grid1D(cells=self.cells, length=self.length)

    def controls(self) -> SimControls:
        return SimControls(cfl=self.cfl, max_time=self.max_time,
                           rho_threshold=self.rho_threshold, ux_threshold=self.ux_threshold,
                           scheme=self.scheme, deriv=self.deriv, dt_max=self.dt_max,
                           max_steps=self.max_steps)


class SweepRequest(BaseModel):
    family: Literal["density_cosine", "velocity_sine", "separatrix"]
    start: float
    stop: float
    steps: int = Field(..., ge=0)
    config: SimulationConfig = Field(default_factory=SimulationConfig)
