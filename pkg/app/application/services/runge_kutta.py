# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/runge_kutta.py

"""
Explicit embedded Runge-Kutta integration with adaptive step-size control.

The Dormand-Prince 5(4) pair propagates the 5th order solution; the difference
to the embedded 4th order solution is the local error estimate. Step sizes are
chosen by a PI controller, rejected steps are retried with a smaller step, and
stages that overflow (as they do close to a finite-time blow-up) count as
rejections rather than failures.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, List, Optional

import numpy as np

from app.domain.exceptions import InvalidParametersError

logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]
StopPredicate = Callable[[float, np.ndarray], Optional[Any]]


class StopStatus(str, Enum):
    STOPPED = "stopped"              # the stop predicate fired
    END_TIME = "end_time"
    STEP_BUDGET = "step_budget"
    STEP_UNDERFLOW = "step_underflow"


@dataclass
class IntegrationResult:
    times: np.ndarray
    states: np.ndarray
    status: StopStatus
    stop_label: Any = None
    accepted: int = 0
    rejected: int = 0
    step_sizes: List[float] = field(default_factory=list)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


# Dormand-Prince 5(4) tableau ===========================================================

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])

_A = np.zeros((7, 7))
_A[1, :1] = [1 / 5]
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]

_B = _A[6].copy()

# coefficients of the local truncation error estimate (5th minus 4th order weights)
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])


class DormandPrince54:
    """
    Dormand-Prince 5(4) integrator with PI step-size control.

    Characteristics
    ---------------
    * Order: 5 (propagating) / 4 (error estimate)
    * Stages: 7, first-same-as-last
    * Explicit, adaptive timestep, no dense output
    """

    SAFETY = 0.9
    MIN_FACTOR = 0.2
    MAX_FACTOR = 5.0
    # PI controller exponents (alpha on the current error, beta on the previous one)
    ALPHA = 0.7 / 5
    BETA = 0.4 / 5

    def __init__(self, rel_tol: float = 1e-10, abs_tol: float = 1e-12,
                 max_step: Optional[float] = None, min_step: float = 1e-14,
                 max_steps: int = 200_000):
        if not (rel_tol > 0 and abs_tol > 0):
            raise InvalidParametersError("Tolerances must be positive.")
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.max_step = np.inf if max_step is None else max_step
        self.min_step = min_step
        self.max_steps = max_steps

    def _error_norm(self, y: np.ndarray, y_new: np.ndarray, err: np.ndarray) -> float:
        scale = self.abs_tol + self.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        return float(np.sqrt(np.mean((err / scale) ** 2)))

    def _initial_step(self, rhs: Rhs, t0: float, y0: np.ndarray, f0: np.ndarray) -> float:
        scale = self.abs_tol + self.rel_tol * np.abs(y0)
        d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        f1 = rhs(t0 + h0, y0 + h0 * f0)
        d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
        if max(d1, d2) <= 1e-15 or not np.isfinite(d2):
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        return min(100 * h0, h1, self.max_step)

    def solve(self, rhs: Rhs, t0: float, y0, t_end: float,
              stop: Optional[StopPredicate] = None) -> IntegrationResult:
        """
        Integrates y' = rhs(t, y) from t0 towards t_end.

        The stop predicate is evaluated on the initial state and on every
        accepted step; a non-None return ends the integration and is stored as
        `stop_label`.
        """
        y = np.array(y0, dtype=float)
        t = float(t0)
        times = [t]
        states = [y.copy()]
        steps: List[float] = []

        if stop is not None:
            label = stop(t, y)
            if label is not None:
                return IntegrationResult(np.array(times), np.array(states),
                                         StopStatus.STOPPED, label)

        K = np.empty((7, y.size))
        K[0] = rhs(t, y)
        h = self._initial_step(rhs, t, y, K[0])
        err_prev = 1.0
        accepted = rejected = 0

        while True:
            if t_end - t <= 1e-15 * max(1.0, abs(t_end)):
                status = StopStatus.END_TIME
                break
            if accepted >= self.max_steps:
                logger.warning(f"Step budget of {self.max_steps} exhausted at t={t!r}.")
                status = StopStatus.STEP_BUDGET
                break
            if h < self.min_step:
                logger.warning(f"Step size underflow (h={h!r}) at t={t!r}.")
                status = StopStatus.STEP_UNDERFLOW
                break

            h = min(h, t_end - t)
            with np.errstate(over="ignore", invalid="ignore"):
                for i in range(1, 7):
                    K[i] = rhs(t + _C[i] * h, y + h * (_A[i, :i] @ K[:i]))
                y_new = y + h * (_B @ K)
                err = self._error_norm(y, y_new, h * (_E @ K))

            if not (np.all(np.isfinite(y_new)) and np.isfinite(err)):
                rejected += 1
                h *= self.MIN_FACTOR
                continue

            if err <= 1.0:
                t += h
                y = y_new
                K[0] = K[6]
                accepted += 1
                times.append(t)
                states.append(y.copy())
                steps.append(h)

                if stop is not None:
                    label = stop(t, y)
                    if label is not None:
                        return IntegrationResult(np.array(times), np.array(states),
                                                 StopStatus.STOPPED, label,
                                                 accepted, rejected, steps)

                if err == 0.0:
                    factor = self.MAX_FACTOR
                else:
                    factor = self.SAFETY * err ** (-self.ALPHA) * err_prev ** self.BETA
                    factor = min(self.MAX_FACTOR, max(self.MIN_FACTOR, factor))
                err_prev = max(err, 1e-4)
                h = min(h * factor, self.max_step)
            else:
                rejected += 1
                h *= max(self.MIN_FACTOR, self.SAFETY * err ** (-1 / 5))

        return IntegrationResult(np.array(times), np.array(states), status, None,
                                 accepted, rejected, steps)
