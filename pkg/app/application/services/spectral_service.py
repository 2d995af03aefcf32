# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/application/services/spectral_service.py

"""
Velocity-gradient algebra.

M = grad u splits into S = (M + M^T)/2 and A = (M - M^T)/2. The eigen-sums that
drive the divergence along particle paths are read off traces:

    sum lambda_M   = tr M = tr S = div u
    sum lambda_M^2 = tr M^2 = sum lambda_S^2 - |omega|^2 / 2

The eigensolver variants in this module exist only to cross-check those
identities.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from app.application.services.runge_kutta import DormandPrince54, StopStatus
from app.domain.entities.gradient import GradientDecomposition, TraceReport
from app.domain.entities.trajectory import IntegratorControls
from app.domain.exceptions import NumericalFailureError, ShapeError, ValidationError

logger = logging.getLogger(__name__)

MAX_TRACE_DIMENSION = 16


def _as_gradient(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ShapeError(f"Velocity gradient must be a square matrix, got shape {M.shape}.")
    if not np.all(np.isfinite(M)):
        raise ValidationError("Velocity gradient has non-finite entries.")
    return M


def decompose(M) -> GradientDecomposition:
    """
    Splits M into its symmetric and skew parts.

    Raises:
        ShapeError: If M is not square.
    """
    M = _as_gradient(M)
    n = M.shape[0]
    sym = (M + M.T) / 2.0
    skew = (M - M.T) / 2.0
    rows, cols = np.triu_indices(n, k=1)
    return GradientDecomposition(sym=sym, skew=skew, vorticity=2.0 * skew[rows, cols],
                                 divergence=float(np.trace(M)))


def eigen_oracle_sums(M) -> Tuple[float, float, float, float]:
    """
    (sum lambda_M, sum lambda_M^2, sum lambda_S, sum lambda_S^2) from eigensolvers.
    Complex eigenvalues of M come in conjugate pairs, so the sums are real.
    """
    M = _as_gradient(M)
    lam_m = np.linalg.eigvals(M)
    lam_s = np.linalg.eigvalsh((M + M.T) / 2.0)
    return (float(np.sum(lam_m).real), float(np.sum(lam_m * lam_m).real),
            float(np.sum(lam_s)), float(np.sum(lam_s * lam_s)))


def trace_identities(M, with_oracle: bool = False) -> TraceReport:
    """
    Trace-wise eigen-sums of M and S and the residuals of

        sum lambda_M = sum lambda_S = div u
        sum lambda_M^2 = sum lambda_S^2 - |omega|^2 / 2

    With `with_oracle`, the same residuals are also evaluated with eigen-sums
    from numpy's eigensolvers.

    Raises:
        ShapeError: If M is not square or larger than MAX_TRACE_DIMENSION.
    """
    M = _as_gradient(M)
    if M.shape[0] > MAX_TRACE_DIMENSION:
        raise ShapeError(
            f"trace_identities supports n <= {MAX_TRACE_DIMENSION}, got n={M.shape[0]}.")
    D = decompose(M)

    sum_m = float(np.trace(M))
    sum_m_sq = float(np.sum(M * M.T))
    sum_s = float(np.trace(D.sym))
    sum_s_sq = float(np.sum(D.sym * D.sym))
    vorticity_sq = float(np.dot(D.vorticity, D.vorticity))
    div = D.divergence

    report = dict(
        sum_lambda_m=sum_m, sum_lambda_m_sq=sum_m_sq,
        sum_lambda_s=sum_s, sum_lambda_s_sq=sum_s_sq,
        vorticity_sq=vorticity_sq, divergence=div,
        residual_sum1=max(abs(sum_m - div), abs(sum_s - div)),
        residual_sum2=abs(sum_m_sq - (sum_s_sq - vorticity_sq / 2.0)),
    )
    if with_oracle:
        o_m, o_m_sq, o_s, o_s_sq = eigen_oracle_sums(M)
        report.update(
            oracle_sum_lambda_m=o_m, oracle_sum_lambda_m_sq=o_m_sq,
            oracle_sum_lambda_s=o_s, oracle_sum_lambda_s_sq=o_s_sq,
            oracle_residual_sum1=max(abs(o_m - div), abs(o_s - div)),
            oracle_residual_sum2=abs(o_m_sq - (o_s_sq - vorticity_sq / 2.0)),
        )
    return TraceReport(**report)


def cauchy_schwarz_gap(D: GradientDecomposition) -> float:
    """
    sum lambda_S^2 - d^2/n >= 0; zero iff S is a multiple of the identity.
    Always zero for n = 1.
    """
    return float(np.sum(D.sym * D.sym)) - D.divergence ** 2 / D.n


def majorant_excess(D: GradientDecomposition) -> float:
    """What the majorant drops from the divergence equation when omega = 0."""
    return cauchy_schwarz_gap(D)


def divergence_rhs(D: GradientDecomposition, rho: float) -> float:
    """
    Right-hand side of the divergence equation along a particle path,
    d' = -sum lambda_S^2 + |omega|^2/2 - (rho - 1)
       = -d^2/n - (rho - 1) - gap + |omega|^2/2.
    """
    sum_s_sq = float(np.sum(D.sym * D.sym))
    return -sum_s_sq + float(np.dot(D.vorticity, D.vorticity)) / 2.0 - (rho - 1.0)


# Skew-part transport ===================================================================

class _LinearPath:
    """Piecewise-linear interpolation of sampled matrices, constant outside the samples."""

    def __init__(self, times: np.ndarray, samples: np.ndarray):
        self.times = times
        self.samples = samples

    def __call__(self, t: float) -> np.ndarray:
        if t <= self.times[0]:
            return self.samples[0]
        if t >= self.times[-1]:
            return self.samples[-1]
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        w = (t - self.times[i]) / (self.times[i + 1] - self.times[i])
        return (1.0 - w) * self.samples[i] + w * self.samples[i + 1]


def _check_skew_inputs(A0, S_times, S_samples) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    A0 = _as_gradient(A0)
    n = A0.shape[0]
    S_times = np.asarray(S_times, dtype=float)
    S_samples = np.asarray(S_samples, dtype=float)
    if S_times.ndim != 1 or S_times.size < 1:
        raise ShapeError("S_path needs at least one sample time.")
    if S_samples.shape != (S_times.size, n, n):
        raise ShapeError(
            f"S_path samples must have shape {(S_times.size, n, n)}, got {S_samples.shape}.")
    if np.any(np.diff(S_times) <= 0):
        raise ValidationError("S_path sample times must be strictly increasing.")
    if not np.allclose(A0, -A0.T, rtol=0.0, atol=1e-14):
        raise ValidationError("A0 must be skew-symmetric.")
    return A0, S_times, S_samples


def integrate_skew_path(A0, S_times: Sequence[float], S_samples, t_end: float,
                        controls: Optional[IntegratorControls] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrates A' = -(A S + S A) along the sampled symmetric path S(t).

    With A skew and S symmetric, A S + S A = B - B^T for B = A S, so the
    right-hand side is skew-symmetric in floating point and A0 = 0 stays
    exactly zero.

    Returns:
        (times, matrices): every accepted step, matrices of shape (k, n, n).

    Raises:
        ShapeError: If the shapes of A0 and the path samples disagree.
    """
    A0, S_times, S_samples = _check_skew_inputs(A0, S_times, S_samples)
    if t_end < 0:
        raise ValidationError(f"t_end must be non-negative, got {t_end}.")
    if t_end == 0:
        return np.array([0.0]), A0[np.newaxis].copy()
    controls = controls or IntegratorControls(rel_tol=1e-10, abs_tol=1e-14, max_time=t_end)
    n = A0.shape[0]
    path = _LinearPath(S_times, S_samples)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        A = y.reshape(n, n)
        B = A @ path(t)
        return -(B - B.T).ravel()

    solver = DormandPrince54(rel_tol=controls.rel_tol, abs_tol=controls.abs_tol,
                             max_step=controls.max_step, min_step=controls.min_step,
                             max_steps=controls.max_steps)
    result = solver.solve(rhs, 0.0, A0.ravel(), t_end)
    if result.status != StopStatus.END_TIME:
        raise NumericalFailureError(
            f"Skew transport stopped at t={result.final_time!r} ({result.status.value}).")
    logger.debug(f"Skew transport n={n} to t={t_end}: {result.accepted} steps.")
    return result.times, result.states.reshape(-1, n, n)


def evolve_skew(A0, S_times: Sequence[float], S_samples, t_end: float,
                controls: Optional[IntegratorControls] = None) -> np.ndarray:
    """A(t_end) for A' = -(A S + S A), A(0) = A0."""
    _, matrices = integrate_skew_path(A0, S_times, S_samples, t_end, controls)
    return matrices[-1]
