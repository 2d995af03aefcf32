# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/threshold_service.py

"""
Closed-form threshold mathematics of the attractive Euler-Poisson system.

F(rho) is the convex potential whose zero level at rho = 1 anchors the phase
portrait; I(d, rho) = rho^(-2/n) (d^2 - n F(rho)) is the path invariant of the
majorant system. The blow-up region is {d < sgn(rho - 1) sqrt(n F(rho))},
split into Omega1 (I > 0, d < 0) and Omega2 (I < 0, rho > 1).

All functions are pure and deterministic.
"""
import math
from typing import List, Tuple

import numpy as np
from scipy.integrate import quad

from app.domain.entities.phase import (
    Classification,
    CriticalPoint,
    CriticalPointKind,
    PhaseState,
    PhysicalParams,
    Verdict,
)
from app.domain.exceptions import DomainError, InvalidParametersError, VacuumStateError

DEFAULT_BOUNDARY_TOL = 1e-9


def _check_dimension(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"Dimension must be a positive integer, got n={n!r}.")


def _evaluate_F_real(rho, n: float):
    """
    F for real-valued n. Only used directly to check the n -> 2 limit;
    evaluate_F restricts n to integers.
    """
    rho = np.asarray(rho, dtype=float)
    if n == 2:
        safe = np.where(rho > 0, rho, 1.0)
        return 1.0 - rho + np.where(rho > 0, rho * np.log(safe), 0.0)
    return 1.0 + 2.0 * rho / (n - 2.0) - n * rho ** (2.0 / n) / (n - 2.0)


def evaluate_F(rho: float, n: int) -> float:
    """
    Returns F(rho) for rho >= 0. F(1) = 0 and F >= 0; F(0) = 1 for every n.

    Raises:
        DomainError: If rho < 0.
    """
    _check_dimension(n)
    if rho < 0:
        raise DomainError(f"F is defined for rho >= 0, got rho={rho}.")
    return float(_evaluate_F_real(rho, n))


def F_prime(rho: float, n: int) -> float:
    """F'(rho) for rho > 0; vanishes at rho = 1."""
    _check_dimension(n)
    if rho <= 0:
        raise DomainError(f"F' is defined for rho > 0, got rho={rho}.")
    if n == 2:
        return math.log(rho)
    return 2.0 / (n - 2) * (1.0 - rho ** (2.0 / n - 1.0))


def F_second_derivative(rho: float, n: int) -> float:
    """
    F''(rho) = (2/n) rho^(2/n - 2), strictly positive.

    Raises:
        DomainError: If rho <= 0.
    """
    _check_dimension(n)
    if rho <= 0:
        raise DomainError(f"F'' is defined for rho > 0, got rho={rho}.")
    return 2.0 / n * rho ** (2.0 / n - 2.0)


def _require_non_vacuum(rho: float) -> None:
    if rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={rho}.")
    if rho == 0:
        raise VacuumStateError("The invariant is undefined at the vacuum state rho = 0.")


def invariant_I(state: PhaseState, n: int) -> float:
    """
    Path invariant rho^(-2/n) (d^2 - n F(rho)) of the majorant system.

    Raises:
        VacuumStateError: If rho = 0.
        DomainError: If rho < 0.
    """
    _check_dimension(n)
    _require_non_vacuum(state.rho)
    F = float(_evaluate_F_real(state.rho, n))
    return state.rho ** (-2.0 / n) * (state.d * state.d - n * F)


def invariant_from_F_integral(state: PhaseState, n: int) -> float:
    """
    The invariant through its defining integral,
    d^2 rho^(-2/n) - 2 int_1^rho (1 - 1/r) r^(-2/n) dr, by adaptive quadrature.
    Independent of the closed form of F.
    """
    _check_dimension(n)
    _require_non_vacuum(state.rho)
    integral, _ = quad(lambda r: (1.0 - 1.0 / r) * r ** (-2.0 / n),
                       1.0, state.rho, epsabs=1e-13, epsrel=1e-12, limit=200)
    return state.d ** 2 * state.rho ** (-2.0 / n) - 2.0 * integral


def _margin(d, rho, n: int):
    F = np.maximum(_evaluate_F_real(rho, n), 0.0)
    return d - np.sign(rho - 1.0) * np.sqrt(n * F)


def classify(state: PhaseState, n: int, boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> Classification:
    """
    Sup-critical test of a single phase state.

    Points within boundary_tol of the separatrix (in the margin metric) are
    reported as Boundary, where no conclusion is drawn.

    Raises:
        DomainError: If rho < 0.
        InvalidParametersError: If boundary_tol <= 0.
    """
    _check_dimension(n)
    if not boundary_tol > 0:
        raise InvalidParametersError(
            f"boundary_tol must be positive, got {boundary_tol}.")
    if state.rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={state.rho}.")
    if state.rho == 0:
        return Classification(verdict=Verdict.INVALID_VACUUM,
                              invariant_value=math.nan, margin=math.nan)

    invariant = invariant_I(state, n)
    margin = float(_margin(state.d, state.rho, n))

    if margin < -boundary_tol:
        # the left branch (I = 0, rho > 1) bounds Omega2 but is labelled Omega1
        if invariant < 0 and state.rho > 1:
            verdict = Verdict.SUP_CRITICAL_OMEGA2
        else:
            verdict = Verdict.SUP_CRITICAL_OMEGA1
    elif abs(margin) <= boundary_tol:
        verdict = Verdict.BOUNDARY
    else:
        verdict = Verdict.NO_BLOWUP_GUARANTEED

    return Classification(verdict=verdict, invariant_value=invariant, margin=margin)


def classify_many(d, rho, n: int, boundary_tol: float = DEFAULT_BOUNDARY_TOL):
    """
    Vectorized classify over arrays of divergences and densities.

    Returns:
        (verdicts, invariant, margin): verdicts is an array of Verdict values
        (strings); invariant and margin are NaN at vacuum points.
    """
    _check_dimension(n)
    if not boundary_tol > 0:
        raise InvalidParametersError(
            f"boundary_tol must be positive, got {boundary_tol}.")
    d, rho = np.broadcast_arrays(np.asarray(d, dtype=float), np.asarray(rho, dtype=float))
    if np.any(rho < 0):
        raise DomainError("Density must be non-negative.")

    vacuum = rho == 0
    safe_rho = np.where(vacuum, 1.0, rho)
    invariant = safe_rho ** (-2.0 / n) * (d * d - n * _evaluate_F_real(safe_rho, n))
    margin = _margin(d, safe_rho, n)

    verdicts = np.full(d.shape, Verdict.NO_BLOWUP_GUARANTEED.value, dtype=object)
    verdicts[np.abs(margin) <= boundary_tol] = Verdict.BOUNDARY.value
    inside = margin < -boundary_tol
    omega2 = inside & (invariant < 0) & (safe_rho > 1)
    verdicts[inside & ~omega2] = Verdict.SUP_CRITICAL_OMEGA1.value
    verdicts[omega2] = Verdict.SUP_CRITICAL_OMEGA2.value
    verdicts[vacuum] = Verdict.INVALID_VACUUM.value

    invariant = np.where(vacuum, np.nan, invariant)
    margin = np.where(vacuum, np.nan, margin)
    return verdicts, invariant, margin


def separatrix(rho: float, n: int) -> Tuple[float, float]:
    """
    Left and right branches (-sqrt(n F), +sqrt(n F)) of the zero level set of I.

    Raises:
        DomainError: If rho < 0.
    """
    s = math.sqrt(n * max(evaluate_F(rho, n), 0.0))
    return -s, s


def critical_points(n: int) -> List[CriticalPoint]:
    """The saddle (0, 1), the nodal source (-sqrt(n), 0) and the nodal sink (sqrt(n), 0)."""
    _check_dimension(n)
    root = math.sqrt(n)
    return [
        CriticalPoint(location=PhaseState(d=0.0, rho=1.0), kind=CriticalPointKind.SADDLE),
        CriticalPoint(location=PhaseState(d=-root, rho=0.0), kind=CriticalPointKind.NODAL_SOURCE),
        CriticalPoint(location=PhaseState(d=root, rho=0.0), kind=CriticalPointKind.NODAL_SINK),
    ]


def rescale_physical(state: PhaseState, params: PhysicalParams) -> PhaseState:
    """
    Maps a physical state to the unit-free one: (d / sqrt(-k c), rho / c).

    Raises:
        DomainError: If rho < 0.
    """
    if state.rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={state.rho}.")
    scale = math.sqrt(-params.k * params.c)
    return PhaseState(d=state.d / scale, rho=state.rho / params.c)


def classify_physical(state: PhaseState, n: int, params: PhysicalParams,
                      boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> Classification:
    return classify(rescale_physical(state, params), n, boundary_tol)


def physical_margin(state: PhaseState, n: int, params: PhysicalParams) -> float:
    """
    d - sgn(rho - c) sqrt(-n k c F(rho / c)), evaluated without rescaling.
    The physical sup-critical condition holds iff this is negative.
    """
    if state.rho < 0:
        raise DomainError(f"Density must be non-negative, got rho={state.rho}.")
    F = max(evaluate_F(state.rho / params.c, n), 0.0)
    sign = float(np.sign(state.rho - params.c))
    return state.d - sign * math.sqrt(-n * params.k * params.c * F)


def chae_tadmor_member(state: PhaseState, n: int, params: PhysicalParams = PhysicalParams()) -> bool:
    """Membership in the legacy one-sided region d < -sqrt(-n k c)."""
    _check_dimension(n)
    return state.d < -math.sqrt(-n * params.k * params.c)
