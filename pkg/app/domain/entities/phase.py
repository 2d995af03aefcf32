# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/entities/phase.py

"""
Entities of the divergence-density phase plane.
"""
from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.exceptions import InvalidParametersError

# Spatial dimension of the flow.
Dimension = Annotated[int, Field(ge=1)]


class PhaseState(BaseModel):
    """
    A point (d, rho) of the phase plane: divergence and density.
    """
    model_config = ConfigDict(frozen=True)

    d: float = Field(..., description="Divergence of the velocity field (1/time).")
    rho: float = Field(..., description="Density; 0 is the vacuum state.")


class PhysicalParams(BaseModel):
    """
    Physical parameters of the Euler-Poisson system: background density c and
    forcing constant k. Only the attractive case k < 0 is supported.
    """
    model_config = ConfigDict(frozen=True)

    c: float = 1.0
    k: float = -1.0

    @model_validator(mode="after")
    def _check_attractive(self) -> "PhysicalParams":
        if not self.c > 0:
            raise InvalidParametersError(
                f"Background density must be positive, got c={self.c}.")
        if not self.k < 0:
            raise InvalidParametersError(
                f"Only attractive forcing k < 0 is supported, got k={self.k}.")
        return self


class Verdict(str, Enum):
    SUP_CRITICAL_OMEGA1 = "SupCriticalOmega1"
    SUP_CRITICAL_OMEGA2 = "SupCriticalOmega2"
    BOUNDARY = "Boundary"
    NO_BLOWUP_GUARANTEED = "NoBlowupGuaranteed"
    INVALID_VACUUM = "InvalidVacuum"

    @property
    def is_sup_critical(self) -> bool:
        return self in (Verdict.SUP_CRITICAL_OMEGA1, Verdict.SUP_CRITICAL_OMEGA2)


class Classification(BaseModel):
    """
    Verdict of the sup-critical test for a single phase state.

    `margin` is the signed distance d - sgn(rho - 1) * sqrt(n F(rho)); it is
    negative inside the blow-up region. Both numbers are NaN for vacuum.
    """
    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    invariant_value: float
    margin: float


class CriticalPointKind(str, Enum):
    SADDLE = "Saddle"
    NODAL_SOURCE = "NodalSource"
    NODAL_SINK = "NodalSink"


class CriticalPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    location: PhaseState
    kind: CriticalPointKind
