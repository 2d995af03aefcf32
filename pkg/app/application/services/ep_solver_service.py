# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/ep_solver_service.py

"""
Periodic one-dimensional pressure-less Euler-Poisson solver (unit-free, c = 1):

    rho_t + (rho u)_x = 0,    u_t + u u_x = -phi_x,    phi_xx = rho - 1.

In one dimension the majorant system holds with equality along particle
paths, so per-cell threshold predictions can be checked against the PDE.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from app.application.services.lagrangian_service import (
    exact_threshold_time_1d,
    integrate_majorant,
)
from app.application.services.threshold_service import DEFAULT_BOUNDARY_TOL, classify_many
from app.domain.entities.field import (
    BlowupPrediction,
    CharacteristicTrace,
    FieldState1D,
    Grid1D,
    InitialDataSpec,
    SimControls,
    SimOutcome,
    SimResult,
)
from app.domain.entities.phase import Classification, PhaseState, Verdict
from app.domain.entities.trajectory import IntegratorControls
from app.domain.exceptions import (
    DomainError,
    NumericalFailureError,
    PoissonSolvabilityError,
    ShapeError,
)

logger = logging.getLogger(__name__)

DEFAULT_POISSON_TOL = 1e-10


def _check_grid_array(values: np.ndarray, grid: Grid1D, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.cells,):
        raise ShapeError(f"{name} must have shape ({grid.cells},), got {values.shape}.")
    return values


def _spectral_wavenumbers(grid: Grid1D) -> np.ndarray:
    """Wavenumbers for first derivatives: the Nyquist mode of an even grid is dropped."""
    k = grid.wavenumbers.copy()
    if grid.cells % 2 == 0:
        k[-1] = 0.0
    return k


def _source_modes(rho: np.ndarray, grid: Grid1D, tol: float) -> np.ndarray:
    rho = _check_grid_array(rho, grid, "rho")
    mean = float(np.mean(rho))
    if abs(mean - 1.0) > tol:
        raise PoissonSolvabilityError(
            f"Periodic Poisson problem needs mean(rho) = 1, got {mean!r} (tol {tol}).")
    return np.fft.rfft(rho - 1.0)


def poisson_potential(rho: np.ndarray, grid: Grid1D, tol: float = DEFAULT_POISSON_TOL) -> np.ndarray:
    """Zero-mean phi with phi_xx = rho - 1."""
    source = _source_modes(rho, grid, tol)
    k = grid.wavenumbers
    phi_hat = np.zeros_like(source)
    phi_hat[1:] = -source[1:] / k[1:] ** 2
    return np.fft.irfft(phi_hat, n=grid.cells)


def poisson_force(rho: np.ndarray, grid: Grid1D, tol: float = DEFAULT_POISSON_TOL) -> np.ndarray:
    """
    The force -phi_x of the periodic Poisson problem phi_xx = rho - 1,
    computed spectrally with the zero mode dropped.

    Raises:
        PoissonSolvabilityError: If |mean(rho) - 1| > tol.
    """
    source = _source_modes(rho, grid, tol)
    k = _spectral_wavenumbers(grid)
    force_hat = np.zeros_like(source)
    nonzero = k != 0
    force_hat[nonzero] = 1j * source[nonzero] / k[nonzero]
    return np.fft.irfft(force_hat, n=grid.cells)


def spectral_derivative(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    f = _check_grid_array(f, grid, "f")
    k = _spectral_wavenumbers(grid)
    return np.fft.irfft(1j * k * np.fft.rfft(f), n=grid.cells)


def centered_derivative(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    f = _check_grid_array(f, grid, "f")
    return (np.roll(f, -1) - np.roll(f, 1)) / (2.0 * grid.dx)


def velocity_gradient(u: np.ndarray, grid: Grid1D, deriv: str = "spectral") -> np.ndarray:
    if deriv == "spectral":
        return spectral_derivative(u, grid)
    return centered_derivative(u, grid)


def initial_state(spec: InitialDataSpec, grid: Grid1D) -> FieldState1D:
    """
    Builds a member of the initial-data library on the grid. Densities are
    normalized to mean 1 before `density_offset` is added.

    Raises:
        DomainError: If a density profile would touch or cross the vacuum.
    """
    k = 2.0 * math.pi * spec.mode / grid.length
    theta = k * grid.x
    rho = np.ones(grid.cells)
    u = np.zeros(grid.cells)

    if spec.kind in ("density_cosine", "separatrix"):
        if spec.amplitude >= 1:
            raise DomainError(f"Density amplitude must be below 1, got {spec.amplitude}.")
        rho = 1.0 + spec.amplitude * np.cos(theta)
        rho = rho / np.mean(rho)
        if spec.kind == "separatrix":
            # u_x = rho - 1 exactly: the margin-zero profile
            u = spectral_integral(rho - 1.0, grid)
    elif spec.kind == "velocity_sine":
        u = -spec.amplitude * np.sin(theta)

    rho = rho + spec.density_offset
    if np.any(rho <= 0):
        raise DomainError("Initial density must be positive everywhere.")
    return FieldState1D(rho=rho, u=u, t=0.0)


def spectral_integral(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    """Zero-mean antiderivative of a zero-mean periodic grid function."""
    f = _check_grid_array(f, grid, "f")
    k = _spectral_wavenumbers(grid)
    f_hat = np.fft.rfft(f)
    g_hat = np.zeros_like(f_hat)
    nonzero = k != 0
    g_hat[nonzero] = f_hat[nonzero] / (1j * k[nonzero])
    return np.fft.irfft(g_hat, n=grid.cells)


# Finite-volume update ===================================================================

def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _face_states(q: np.ndarray, reconstruct: bool):
    """Left and right states at faces i + 1/2."""
    right_neighbour = np.roll(q, -1)
    if not reconstruct:
        return q, right_neighbour
    slope = _minmod(q - np.roll(q, 1), right_neighbour - q)
    return q + slope / 2.0, right_neighbour - np.roll(slope, -1) / 2.0


def _tendency(rho: np.ndarray, u: np.ndarray, grid: Grid1D, reconstruct: bool) -> tuple:
    """Semi-discrete right-hand sides (d rho/dt, du/dt) of the finite-volume scheme."""
    rho_l, rho_r = _face_states(rho, reconstruct)
    u_l, u_r = _face_states(u, reconstruct)

    # mass: upwind on the face velocity
    u_face = 0.5 * (u_l + u_r)
    mass_flux = u_face * np.where(u_face >= 0, rho_l, rho_r)

    # velocity: Rusanov flux for u^2/2
    speed = np.maximum(np.abs(u_l), np.abs(u_r))
    burgers_flux = 0.25 * (u_l * u_l + u_r * u_r) - 0.5 * speed * (u_r - u_l)

    drho = -(mass_flux - np.roll(mass_flux, 1)) / grid.dx
    # stage densities keep mean 1 up to round-off, which the relaxed tolerance absorbs
    du = -(burgers_flux - np.roll(burgers_flux, 1)) / grid.dx + poisson_force(rho, grid, tol=1e-8)
    return drho, du


def time_step(state: FieldState1D, grid: Grid1D, controls: SimControls,
              t_end: Optional[float] = None) -> float:
    """dt = min(cfl dx / (max|u| + eps_u), dt_max, remaining time)."""
    dt = controls.cfl * grid.dx / (float(np.max(np.abs(state.u))) + controls.eps_u)
    dt = min(dt, controls.dt_max)
    if t_end is not None:
        dt = min(dt, t_end - state.t)
    return dt


def step(state: FieldState1D, grid: Grid1D, controls: SimControls = SimControls(),
         t_end: Optional[float] = None) -> FieldState1D:
    """
    Advances one CFL-limited time step with the configured scheme: fv1
    (forward Euler, first order) or ssp2 (two-stage SSP Runge-Kutta with
    minmod-limited reconstruction).

    Raises:
        NumericalFailureError: On non-finite values, negative density or a
            change of the mass mean by more than controls.mass_tol.
    """
    rho = _check_grid_array(state.rho, grid, "rho")
    u = _check_grid_array(state.u, grid, "u")
    dt = time_step(state, grid, controls, t_end)

    with np.errstate(over="ignore", invalid="ignore"):
        if controls.scheme == "fv1":
            drho, du = _tendency(rho, u, grid, reconstruct=False)
            rho_new, u_new = rho + dt * drho, u + dt * du
        else:
            drho, du = _tendency(rho, u, grid, reconstruct=True)
            rho_1, u_1 = rho + dt * drho, u + dt * du
            drho, du = _tendency(rho_1, u_1, grid, reconstruct=True)
            rho_new = 0.5 * rho + 0.5 * (rho_1 + dt * drho)
            u_new = 0.5 * u + 0.5 * (u_1 + dt * du)

    if not (np.all(np.isfinite(rho_new)) and np.all(np.isfinite(u_new))):
        raise NumericalFailureError(f"Non-finite field values at t={state.t + dt!r}.")
    if np.any(rho_new < 0):
        raise NumericalFailureError(f"Negative density at t={state.t + dt!r}.")
    mass_change = abs(float(np.mean(rho_new)) - float(np.mean(rho)))
    if mass_change > controls.mass_tol:
        raise NumericalFailureError(
            f"Mass mean changed by {mass_change!r} in one step at t={state.t + dt!r}.")

    return FieldState1D(rho=rho_new, u=u_new, t=state.t + dt)


def run(initial: FieldState1D, grid: Grid1D, controls: SimControls = SimControls()) -> SimResult:
    """
    Steps until max rho >= rho_threshold or min u_x <= ux_threshold
    (BlowupDetected), until max_time (RanToMaxTime), or until a step fails
    (NumericalFailure, reported in the result rather than raised).
    """
    state = initial
    max_rho_history = []
    min_ux_history = []
    steps = 0
    logger.info(
        f"Simulation start: {grid.cells} cells, scheme={controls.scheme}, "
        f"max_time={controls.max_time}, thresholds rho>={controls.rho_threshold}, "
        f"u_x<={controls.ux_threshold}.")

    while True:
        max_rho = float(np.max(state.rho))
        min_ux = float(np.min(velocity_gradient(state.u, grid, controls.deriv)))
        max_rho_history.append((state.t, max_rho))
        min_ux_history.append((state.t, min_ux))

        if max_rho >= controls.rho_threshold or min_ux <= controls.ux_threshold:
            logger.info(f"Blow-up detected at t={state.t!r} after {steps} steps.")
            return SimResult(outcome=SimOutcome.BLOWUP_DETECTED, t_detect=state.t,
                             max_rho_history=max_rho_history, min_ux_history=min_ux_history,
                             final_state=state, steps=steps)
        if state.t >= controls.max_time:
            logger.info(f"Reached max_time={controls.max_time} after {steps} steps.")
            return SimResult(outcome=SimOutcome.RAN_TO_MAX_TIME,
                             max_rho_history=max_rho_history, min_ux_history=min_ux_history,
                             final_state=state, steps=steps)
        if steps >= controls.max_steps:
            message = f"Step budget of {controls.max_steps} exhausted at t={state.t!r}."
            logger.warning(message)
            return SimResult(outcome=SimOutcome.NUMERICAL_FAILURE, failure=message,
                             max_rho_history=max_rho_history, min_ux_history=min_ux_history,
                             final_state=state, steps=steps)

        try:
            state = step(state, grid, controls, t_end=controls.max_time)
        except NumericalFailureError as e:
            logger.error(f"Simulation failed: {e.message}")
            return SimResult(outcome=SimOutcome.NUMERICAL_FAILURE, failure=e.message,
                             max_rho_history=max_rho_history, min_ux_history=min_ux_history,
                             final_state=state, steps=steps)
        steps += 1


# Predictions from initial data ==========================================================

def predict_blowup_from_initial(initial: FieldState1D, grid: Grid1D,
                                controls: SimControls = SimControls(),
                                candidates: int = 8,
                                boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> BlowupPrediction:
    """
    Classifies (u_x, rho) cell by cell at n = 1 and predicts the time at which
    the run's detection thresholds are first met.

    `t_ode` is the exact n = 1 majorant time per cell. The `candidates`
    sup-critical cells with the smallest exact times are re-integrated with
    integrate_majorant, whose detection thresholds equal the simulation's,
    and t_pred is the minimum over those.
    """
    rho = _check_grid_array(initial.rho, grid, "rho")
    d0 = velocity_gradient(initial.u, grid, controls.deriv)
    verdicts, invariant, margin = classify_many(d0, rho, 1, boundary_tol)
    classifications = [Classification(verdict=Verdict(v), invariant_value=float(i), margin=float(m))
                       for v, i, m in zip(verdicts, invariant, margin)]
    t_ode = exact_threshold_time_1d(d0, rho, controls.rho_threshold)

    sup_critical = np.array([Verdict(v).is_sup_critical for v in verdicts])
    if not np.any(sup_critical):
        logger.info("No sup-critical cell; no blow-up predicted.")
        return BlowupPrediction(x=grid.x, d0=d0, rho0=rho, classifications=classifications,
                                t_ode=t_ode)

    ranked = np.where(sup_critical, t_ode, np.inf)
    order = np.argsort(ranked, kind="stable")[:max(1, candidates)]
    t_pred, critical_cell = math.inf, None
    for cell in order:
        if not sup_critical[cell]:
            continue
        horizon = ranked[cell] if np.isfinite(ranked[cell]) else 10.0 * controls.max_time
        integrator = IntegratorControls(rel_tol=1e-10, abs_tol=1e-12,
                                        max_time=max(1.5 * horizon, 1e-6),
                                        blowup_rho=controls.rho_threshold,
                                        blowup_d=controls.ux_threshold)
        trajectory = integrate_majorant(PhaseState(d=float(d0[cell]), rho=float(rho[cell])),
                                        1, integrator)
        if trajectory.blowup_time is not None and trajectory.blowup_time < t_pred:
            t_pred, critical_cell = trajectory.blowup_time, int(cell)

    logger.info(f"Predicted blow-up at t={t_pred!r} (cell {critical_cell}).")
    return BlowupPrediction(x=grid.x, d0=d0, rho0=rho, classifications=classifications,
                            t_ode=t_ode, t_pred=t_pred if critical_cell is not None else None,
                            critical_cell=critical_cell)


# Characteristics ========================================================================

def _sample_periodic(values: np.ndarray, positions: np.ndarray, grid: Grid1D) -> np.ndarray:
    return np.interp(positions, grid.x, values, period=grid.length)


def trace_characteristics(initial: FieldState1D, grid: Grid1D, controls: SimControls,
                          starts: Sequence[float], t_end: float) -> CharacteristicTrace:
    """
    Advects particles with the numerical velocity (Heun's method on
    periodically interpolated velocities) while the field is stepped, and
    samples (u_x, rho) along every path.
    """
    positions = np.mod(np.asarray(starts, dtype=float), grid.length)
    state = initial
    times = [state.t]
    paths = [positions.copy()]
    ux = velocity_gradient(state.u, grid, controls.deriv)
    d_samples = [_sample_periodic(ux, positions, grid)]
    rho_samples = [_sample_periodic(state.rho, positions, grid)]

    while state.t < t_end:
        previous = state
        state = step(state, grid, controls, t_end=t_end)
        dt = state.t - previous.t
        v0 = _sample_periodic(previous.u, positions, grid)
        predicted = positions + dt * v0
        v1 = _sample_periodic(state.u, predicted, grid)
        positions = np.mod(positions + 0.5 * dt * (v0 + v1), grid.length)

        ux = velocity_gradient(state.u, grid, controls.deriv)
        times.append(state.t)
        paths.append(positions.copy())
        d_samples.append(_sample_periodic(ux, positions, grid))
        rho_samples.append(_sample_periodic(state.rho, positions, grid))

    return CharacteristicTrace(times=np.array(times), positions=np.array(paths),
                               d=np.array(d_samples), rho=np.array(rho_samples))


def characteristic_residual(trace: CharacteristicTrace) -> float:
    """
    Max residual of d' = -d^2 - (rho - 1), rho' = -d rho along the traced
    paths, with time derivatives from second-order finite differences.
    End points are excluded.
    """
    if trace.times.size < 3:
        raise ShapeError("Need at least three samples along the characteristics.")
    dd = np.gradient(trace.d, trace.times, axis=0)
    drho = np.gradient(trace.rho, trace.times, axis=0)
    res_d = dd - (-trace.d ** 2 - (trace.rho - 1.0))
    res_rho = drho - (-trace.d * trace.rho)
    return float(max(np.max(np.abs(res_d[1:-1])), np.max(np.abs(res_rho[1:-1]))))
