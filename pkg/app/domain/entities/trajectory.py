# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/domain/entities/trajectory.py

"""
Entities produced by the phase-plane integrators: trajectories, integrator
controls, Riccati blow-up bounds, comparison reports and portrait datasets.
"""
import math
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.entities.phase import CriticalPoint, PhaseState
from app.domain.exceptions import InvalidParametersError, OrderingViolationError


class EventKind(str, Enum):
    BLOWUP_DETECTED = "BlowupDetected"
    LEFT_DOMAIN = "LeftDomain"
    MAX_TIME_REACHED = "MaxTimeReached"
    STEP_BUDGET_EXHAUSTED = "StepBudgetExhausted"


class TrajectoryEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: EventKind
    t: float


class IntegratorControls(BaseModel):
    """
    Tolerances, horizon and detection thresholds of an adaptive integration.
    """
    model_config = ConfigDict(frozen=True)

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_time: float = 50.0
    blowup_rho: float = 1e6
    blowup_d: float = -1e6
    max_steps: int = 200_000
    min_rho: float = Field(0.0, description="LeftDomain floor for the density.")
    direction: Literal["forward", "backward"] = "forward"
    max_step: Optional[float] = None
    min_step: float = 1e-14

    @model_validator(mode="after")
    def _check_controls(self) -> "IntegratorControls":
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidParametersError("Integrator tolerances must be positive.")
        if not self.blowup_rho > 1:
            raise InvalidParametersError("blowup_rho must exceed 1.")
        if not self.blowup_d < 0:
            raise InvalidParametersError("blowup_d must be negative.")
        if not (self.max_time > 0 and self.max_steps > 0):
            raise InvalidParametersError("max_time and max_steps must be positive.")
        return self


class Trajectory(BaseModel):
    """
    Time-ordered samples of a phase-plane path.

    Times are elapsed times from the start, also for backward integration
    (`direction == "backward"`), so they are always strictly increasing.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    times: np.ndarray
    d: np.ndarray
    rho: np.ndarray
    invariant: np.ndarray
    events: List[TrajectoryEvent] = Field(default_factory=list)
    invariant_drift: float = 0.0
    direction: Literal["forward", "backward"] = "forward"

    @property
    def samples(self) -> List[Tuple[float, PhaseState]]:
        return [(float(t), PhaseState(d=float(d), rho=float(r)))
                for t, d, r in zip(self.times, self.d, self.rho)]

    @property
    def terminal_event(self) -> Optional[TrajectoryEvent]:
        return self.events[-1] if self.events else None

    @property
    def final_state(self) -> PhaseState:
        return PhaseState(d=float(self.d[-1]), rho=float(self.rho[-1]))

    @property
    def blowup_time(self) -> Optional[float]:
        event = self.terminal_event
        if event is not None and event.kind == EventKind.BLOWUP_DETECTED:
            return event.t
        return None


class BoundsCase(str, Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    NOT_APPLICABLE = "NotApplicable"


class BlowupBounds(BaseModel):
    """
    Closed-form upper bound on the blow-up time of the majorant system.
    """
    model_config = ConfigDict(frozen=True)

    case_kind: BoundsCase
    t_upper: float = math.inf
    epsilon_used: float = 0.0
    invariant_used: float = math.nan
    note: str = ""


class OrderingReport(BaseModel):
    """
    Outcome of a comparison run: lower system (d, rho) versus majorant (e, zeta).
    """
    strict: bool
    steps_checked: int
    violations: int
    first_violation_time: Optional[float] = None
    final_time: float
    stop_reason: EventKind

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def raise_for_violation(self) -> None:
        if self.violations:
            raise OrderingViolationError(
                f"Comparison ordering violated {self.violations} time(s), "
                f"first at t={self.first_violation_time!r}.",
                first_time=float(self.first_violation_time),
            )


class PortraitDataset(BaseModel):
    """
    Tabular phase-portrait data: separatrix, nullclines, critical points,
    the legacy one-sided line, seeded trajectories and a verdict grid.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    separatrix_rho: np.ndarray
    separatrix_left: np.ndarray
    separatrix_right: np.ndarray
    nullcline_rho: np.ndarray
    nullcline_neg: np.ndarray
    nullcline_pos: np.ndarray
    # rho' = 0 holds on d = 0 at every sampled density
    density_nullcline_rho: np.ndarray
    critical_points: List[CriticalPoint]
    legacy_d: float
    trajectories: List[Trajectory]
    grid_d: np.ndarray
    grid_rho: np.ndarray
    grid_verdict: np.ndarray
