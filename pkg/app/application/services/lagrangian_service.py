# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/lagrangian_service.py

"""
Dynamics in the (d, rho) phase plane.

Along particle paths the divergence and density of a curl-free flow obey
d' <= -d^2/n - (rho - 1), rho' = -d rho. Replacing the inequality by an
equality gives the majorant system integrated here. This module provides the
adaptive integration with blow-up detection, the Riccati upper bounds on the
blow-up time, the comparison harness between the inequality system and its
majorant, the exact n = 1 solution and phase-portrait data.
"""
import logging
import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from app.application.services.runge_kutta import DormandPrince54, StopStatus
from app.application.services.threshold_service import (
    DEFAULT_BOUNDARY_TOL,
    _evaluate_F_real,
    classify,
    classify_many,
    critical_points,
    invariant_I,
)
from app.domain.entities.phase import PhaseState
from app.domain.entities.trajectory import (
    BlowupBounds,
    BoundsCase,
    EventKind,
    IntegratorControls,
    OrderingReport,
    PortraitDataset,
    Trajectory,
    TrajectoryEvent,
)
from app.domain.exceptions import DomainError, ValidationError, VacuumStateError

logger = logging.getLogger(__name__)

ExcessFunction = Callable[[float], float]


def majorant_rhs(state: PhaseState, n: int) -> Tuple[float, float]:
    """(d', rho') = (-d^2/n - (rho - 1), -d rho)."""
    d, rho = state.d, state.rho
    return -d * d / n - (rho - 1.0), -d * rho


def majorant_symmetry_residual(state: PhaseState, n: int) -> float:
    """
    Residual of the reflection symmetry of the majorant field: at (-d, rho)
    the d-component is unchanged and the rho-component changes sign, so
    (d(t), rho(t)) -> (-d(-t), rho(-t)) maps solutions to solutions.
    """
    dd, drho = majorant_rhs(state, n)
    dd_ref, drho_ref = majorant_rhs(PhaseState(d=-state.d, rho=state.rho), n)
    return max(abs(dd_ref - dd), abs(drho_ref + drho))


def _invariant_series(d: np.ndarray, rho: np.ndarray, n: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        values = rho ** (-2.0 / n) * (d * d - n * _evaluate_F_real(rho, n))
    return np.where(rho > 0, values, np.nan)


def _solver(controls: IntegratorControls) -> DormandPrince54:
    return DormandPrince54(rel_tol=controls.rel_tol, abs_tol=controls.abs_tol,
                           max_step=controls.max_step, min_step=controls.min_step,
                           max_steps=controls.max_steps)


def _terminal_kind(status: StopStatus, label) -> EventKind:
    if status == StopStatus.STOPPED:
        return label
    if status == StopStatus.END_TIME:
        return EventKind.MAX_TIME_REACHED
    if status == StopStatus.STEP_BUDGET:
        return EventKind.STEP_BUDGET_EXHAUSTED
    # step-size underflow only happens while the solution runs off to infinity
    return EventKind.BLOWUP_DETECTED


def _build_trajectory(times: np.ndarray, d: np.ndarray, rho: np.ndarray, n: int,
                      kind: EventKind, direction: str) -> Trajectory:
    event_time = float(times[-1])
    keep = rho > 0
    times, d, rho = times[keep], d[keep], rho[keep]
    invariant = _invariant_series(d, rho, n)
    i0 = invariant[0]
    drift = float(np.max(np.abs(invariant - i0)) / max(1.0, abs(i0)))
    return Trajectory(n=n, times=times, d=d, rho=rho, invariant=invariant,
                      events=[TrajectoryEvent(kind=kind, t=event_time)],
                      invariant_drift=drift, direction=direction)


def integrate_majorant(state0: PhaseState, n: int,
                       controls: IntegratorControls = IntegratorControls()) -> Trajectory:
    """
    Adaptive integration of the majorant system from a non-vacuum state.

    Terminates with BlowupDetected once rho >= blowup_rho or d <= blowup_d,
    with LeftDomain once rho <= min_rho, with MaxTimeReached at max_time, and
    with StepBudgetExhausted when max_steps accepted steps were not enough.

    Raises:
        VacuumStateError: If state0.rho = 0.
        DomainError: If state0.rho < 0.
    """
    if state0.rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={state0.rho}.")
    if state0.rho == 0:
        raise VacuumStateError("Cannot integrate from the vacuum state.")

    sign = 1.0 if controls.direction == "forward" else -1.0

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        d, rho = y
        return np.array([sign * (-d * d / n - (rho - 1.0)), sign * (-d * rho)])

    def stop(t: float, y: np.ndarray) -> Optional[EventKind]:
        d, rho = y
        if rho >= controls.blowup_rho or d <= controls.blowup_d:
            return EventKind.BLOWUP_DETECTED
        if rho <= controls.min_rho:
            return EventKind.LEFT_DOMAIN
        return None

    result = _solver(controls).solve(rhs, 0.0, [state0.d, state0.rho],
                                     controls.max_time, stop)
    kind = _terminal_kind(result.status, result.stop_label)
    if result.status == StopStatus.STEP_UNDERFLOW:
        logger.warning(
            f"Declaring blow-up from step-size underflow at t={result.final_time!r} "
            f"(d={result.final_state[0]!r}, rho={result.final_state[1]!r}).")

    trajectory = _build_trajectory(result.times, result.states[:, 0], result.states[:, 1],
                                   n, kind, controls.direction)
    logger.debug(
        f"Majorant from ({state0.d}, {state0.rho}), n={n}: {kind.value} at "
        f"t={trajectory.terminal_event.t!r} after {result.accepted} steps "
        f"({result.rejected} rejected), drift={trajectory.invariant_drift:.3e}.")
    return trajectory


# Riccati bounds ========================================================================

def riccati_power_blowup_time(a: float, n: int, rho0: float) -> float:
    """Blow-up time of rho' = a rho^(1 + 1/n), rho(0) = rho0 > 0, a > 0."""
    return n / (a * rho0 ** (1.0 / n))


def riccati_quadratic_blowdown_time(beta: float, n: int, d0: float) -> float:
    """Time at which d' = -(d^2 + beta^2)/n, d(0) = d0, reaches -infinity."""
    return n / beta * (math.pi / 2.0 + math.atan(d0 / beta))


def integrate_scalar(f: Callable[[float, float], float], y0: float,
                     reached: Callable[[float], bool],
                     controls: IntegratorControls = IntegratorControls()) -> Optional[float]:
    """
    Integrates a scalar ODE y' = f(t, y) and returns the first accepted time
    at which `reached(y)` holds, or None if it never does within max_time.
    """
    result = _solver(controls).solve(
        lambda t, y: np.array([f(t, y[0])]), 0.0, [y0], controls.max_time,
        lambda t, y: True if reached(y[0]) else None)
    if result.status in (StopStatus.STOPPED, StopStatus.STEP_UNDERFLOW):
        return result.final_time
    return None


def blowup_time_bounds(state0: PhaseState, n: int, epsilon: Optional[float] = None,
                       boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> BlowupBounds:
    """
    Closed-form upper bound on the majorant blow-up time.

    The state is first shifted to (d0 + eps, rho0 - eps). With eps = None the
    shift is 0 for strictly interior states and half the distance to the
    boundary (in the margin metric) for states inside the boundary band.

    Case1 (I > 0, d < 0): rho' >= sqrt(I) rho^(1+1/n) gives
        t_upper = n / (sqrt(I) rho0^(1/n)), with the un-shifted rho0.
    Case2 (I < 0, rho > 1): rho - 1 >= -I/2 gives d' <= -(d^2 + beta^2)/n,
        beta = sqrt(n |I| / 2), and t_upper = (n/beta)(pi/2 + atan(d0/beta)).
    """
    if state0.rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={state0.rho}.")
    if epsilon is not None and epsilon < 0:
        raise ValidationError(f"epsilon must be non-negative, got {epsilon}.")
    if state0.rho == 0:
        return BlowupBounds(case_kind=BoundsCase.NOT_APPLICABLE, note="vacuum state")

    if epsilon is None:
        margin = classify(state0, n, boundary_tol).margin
        epsilon = 0.0 if (margin < -boundary_tol or margin >= 0) else -margin / 2.0

    shifted = PhaseState(d=state0.d + epsilon, rho=state0.rho - epsilon)
    if shifted.rho <= 0:
        return BlowupBounds(case_kind=BoundsCase.NOT_APPLICABLE, epsilon_used=epsilon,
                            note="shift leaves the non-vacuum half plane")

    invariant = invariant_I(shifted, n)
    if invariant > 0 and shifted.d < 0:
        t_upper = riccati_power_blowup_time(math.sqrt(invariant), n, state0.rho)
        note = "un-shifted rho0 with the shifted invariant" if epsilon > 0 else ""
        return BlowupBounds(case_kind=BoundsCase.CASE1, t_upper=t_upper,
                            epsilon_used=epsilon, invariant_used=invariant, note=note)
    if invariant < 0 and shifted.rho > 1:
        beta = math.sqrt(n * -invariant / 2.0)
        t_upper = riccati_quadratic_blowdown_time(beta, n, shifted.d)
        return BlowupBounds(case_kind=BoundsCase.CASE2, t_upper=t_upper,
                            epsilon_used=epsilon, invariant_used=invariant)
    return BlowupBounds(case_kind=BoundsCase.NOT_APPLICABLE, epsilon_used=epsilon,
                        invariant_used=invariant, note="shifted state is not in the blow-up region")


# Exact solution for n = 1 ===============================================================
#
# With v = 1/rho the majorant system becomes v'' = v - 1, hence
# v(t) = 1 + (v0 - 1) cosh t + v0' sinh t with v0 = 1/rho0, v0' = d0/rho0,
# rho = 1/v and d = v'/v.

def exact_state_1d(state0: PhaseState, t: float) -> PhaseState:
    """Exact n = 1 majorant state at time t (before blow-up)."""
    if state0.rho <= 0:
        raise VacuumStateError("The exact solution needs a non-vacuum start.")
    a = 1.0 / state0.rho - 1.0
    b = state0.d / state0.rho
    v = 1.0 + a * math.cosh(t) + b * math.sinh(t)
    dv = a * math.sinh(t) + b * math.cosh(t)
    return PhaseState(d=dv / v, rho=1.0 / v)


def exact_threshold_time_1d(d0, rho0, rho_threshold: float = math.inf):
    """
    First time at which the exact n = 1 majorant density reaches
    rho_threshold (infinity by default, i.e. the blow-up time).
    Vectorized over d0 and rho0; inf where the threshold is never reached.
    """
    d0, rho0 = np.broadcast_arrays(np.asarray(d0, dtype=float), np.asarray(rho0, dtype=float))
    a = 1.0 / rho0 - 1.0
    b = d0 / rho0
    target = 0.0 if math.isinf(rho_threshold) else 1.0 / rho_threshold
    c = target - 1.0

    # a cosh t + b sinh t = c  <=>  (a + b) z^2 - 2 c z + (a - b) = 0, z = e^t
    p = a + b
    disc = c * c - a * a + b * b
    times = np.full(d0.shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(np.where(disc >= 0, disc, np.nan))
        candidates = np.stack([(c - root) / p, (c + root) / p,
                               np.where(p == 0, (a - b) / (2.0 * c), np.nan)])
    candidates = np.where(np.isfinite(candidates) & (candidates >= 1.0), candidates, np.inf)
    z = np.min(candidates, axis=0)
    times = np.where(np.isfinite(z), np.log(np.where(np.isfinite(z), z, 1.0)), times)
    times = np.where(rho0 >= rho_threshold, 0.0, times)
    return times


def exact_blowup_time_1d(state0: PhaseState) -> float:
    """Blow-up time of the exact n = 1 majorant solution (inf if none)."""
    if state0.rho <= 0:
        raise VacuumStateError("The exact solution needs a non-vacuum start.")
    return float(exact_threshold_time_1d(state0.d, state0.rho))


# Comparison harness =====================================================================

class ExcessProfile:
    """
    Nonnegative excess term as a function of time: a shape-preserving
    piecewise cubic through user samples, clamped at zero, held constant
    outside the sampled interval.
    """

    def __init__(self, times: Sequence[float], values: Sequence[float]):
        times = np.asarray(times, dtype=float)
        values = np.maximum(np.asarray(values, dtype=float), 0.0)
        if times.ndim != 1 or times.size < 2 or times.shape != values.shape:
            raise ValidationError("Excess samples need at least two (time, value) pairs.")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("Excess sample times must be strictly increasing.")
        self._t0, self._t1 = times[0], times[-1]
        self._interp = PchipInterpolator(times, values)

    @classmethod
    def constant(cls, value: float, horizon: float = 1.0) -> "ExcessProfile":
        return cls([0.0, horizon], [value, value])

    def __call__(self, t: float) -> float:
        return max(0.0, float(self._interp(min(max(t, self._t0), self._t1))))


def integrate_comparison(lower0: PhaseState, upper0: PhaseState, excess: ExcessFunction,
                         n: int, controls: IntegratorControls = IntegratorControls(),
                         strict: bool = True,
                         tol: float = 0.0) -> Tuple[Trajectory, Trajectory, OrderingReport]:
    """
    Co-integrates the inequality system
        d' = -d^2/n - (rho - 1) - excess(t),  rho' = -d rho
    and its majorant (e, zeta) on one adaptive time grid, and checks the
    ordering d < e, 0 < zeta < rho at every accepted step while all
    solutions stay finite. With strict=False the ordering is d <= e, zeta <= rho.

    Raises:
        ValidationError: If the initial data are not ordered.
    """
    if strict:
        ordered = lower0.d < upper0.d and 0 < upper0.rho < lower0.rho
    else:
        ordered = lower0.d <= upper0.d and 0 < upper0.rho <= lower0.rho
    if not ordered:
        raise ValidationError(
            "Comparison needs d(0) < e(0) and 0 < zeta(0) < rho(0) "
            f"(got lower={lower0!r}, upper={upper0!r}).")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        d, rho, e, zeta = y
        return np.array([
            -d * d / n - (rho - 1.0) - excess(t),
            -d * rho,
            -e * e / n - (zeta - 1.0),
            -e * zeta,
        ])

    def stop(t: float, y: np.ndarray) -> Optional[EventKind]:
        d, rho, e, zeta = y
        if (max(rho, zeta) >= controls.blowup_rho or min(d, e) <= controls.blowup_d):
            return EventKind.BLOWUP_DETECTED
        if min(rho, zeta) <= controls.min_rho:
            return EventKind.LEFT_DOMAIN
        return None

    y0 = [lower0.d, lower0.rho, upper0.d, upper0.rho]
    result = _solver(controls).solve(rhs, 0.0, y0, controls.max_time, stop)
    kind = _terminal_kind(result.status, result.stop_label)

    d, rho, e, zeta = result.states.T
    if strict:
        bad = ~(d - e < tol) | ~(zeta - rho < tol) | ~(zeta > 0)
    else:
        bad = (d - e > tol) | (zeta - rho > tol) | ~(zeta > 0)
    # the stopping sample may already be non-finite for the first system to blow up
    bad &= np.all(np.isfinite(result.states), axis=1)
    violations = int(np.count_nonzero(bad))
    first = float(result.times[np.argmax(bad)]) if violations else None
    if violations:
        logger.error(f"Comparison ordering violated {violations} time(s), first at t={first!r}.")

    report = OrderingReport(strict=strict, steps_checked=int(result.times.size),
                            violations=violations, first_violation_time=first,
                            final_time=result.final_time, stop_reason=kind)
    lower = _build_trajectory(result.times, d, rho, n, kind, "forward")
    upper = _build_trajectory(result.times, e, zeta, n, kind, "forward")
    return lower, upper, report


# Phase portrait =========================================================================

def _positive_axis(lo: float, hi: float, resolution: int) -> np.ndarray:
    if lo == 0:
        return np.linspace(lo, hi, resolution + 1)[1:]
    return np.linspace(lo, hi, resolution)


def emit_portrait(n: int, rho_range: Tuple[float, float], d_range: Tuple[float, float],
                  resolution: int, seeds: Iterable[PhaseState],
                  controls: Optional[IntegratorControls] = None,
                  boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> PortraitDataset:
    """
    Builds the phase-portrait dataset of the majorant system.

    Raises:
        ValidationError: If resolution is not positive or a range is empty.
    """
    if resolution <= 0:
        raise ValidationError(f"resolution must be positive, got {resolution}.")
    rho_lo, rho_hi = rho_range
    d_lo, d_hi = d_range
    if not (0 <= rho_lo < rho_hi and d_lo < d_hi):
        raise ValidationError(f"Invalid portrait ranges rho={rho_range}, d={d_range}.")
    if controls is None:
        controls = IntegratorControls(rel_tol=1e-9, abs_tol=1e-12, max_time=20.0)

    rho_axis = _positive_axis(rho_lo, rho_hi, resolution)
    branch = np.sqrt(n * np.maximum(_evaluate_F_real(rho_axis, n), 0.0))

    null_rho = rho_axis[rho_axis <= 1.0]
    null_d = np.sqrt(n * (1.0 - null_rho))

    trajectories = [integrate_majorant(seed, n, controls) for seed in seeds]

    d_axis = np.linspace(d_lo, d_hi, resolution)
    grid_d, grid_rho = np.meshgrid(d_axis, rho_axis, indexing="ij")
    verdicts, _, _ = classify_many(grid_d.ravel(), grid_rho.ravel(), n, boundary_tol)

    logger.info(
        f"Portrait n={n}: {rho_axis.size} separatrix rows, {len(trajectories)} trajectories, "
        f"{verdicts.size} grid cells.")
    return PortraitDataset(
        n=n,
        separatrix_rho=rho_axis, separatrix_left=-branch, separatrix_right=branch,
        nullcline_rho=null_rho, nullcline_neg=-null_d, nullcline_pos=null_d,
        density_nullcline_rho=rho_axis,
        critical_points=critical_points(n), legacy_d=-math.sqrt(n),
        trajectories=trajectories,
        grid_d=grid_d.ravel(), grid_rho=grid_rho.ravel(), grid_verdict=verdicts,
    )
