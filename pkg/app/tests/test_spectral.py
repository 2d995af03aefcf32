# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/tests/test_spectral.py

import math

import numpy as np
import pytest

from app.application.services.spectral_service import (
    cauchy_schwarz_gap,
    decompose,
    divergence_rhs,
    eigen_oracle_sums,
    evolve_skew,
    integrate_skew_path,
    majorant_excess,
    trace_identities,
)
from app.domain.exceptions import ShapeError, ValidationError


def _random_skew(rng, n, scale=1.0):
    B = rng.uniform(-scale, scale, (n, n))
    return B - B.T


def _random_sym_path(rng, n, samples=9, t_end=1.0):
    times = np.linspace(0.0, t_end, samples)
    raw = rng.uniform(-2.0, 2.0, (samples, n, n))
    return times, (raw + np.transpose(raw, (0, 2, 1))) / 2.0


# ==============================
# Decomposition
# ==============================


def test_symmetric_matrix_has_no_skew_part():
    M = np.array([[1.0, 2.0], [2.0, -3.0]])
    D = decompose(M)
    assert np.array_equal(D.skew, np.zeros((2, 2)))
    assert np.array_equal(D.vorticity, np.zeros(1))
    assert D.divergence == -2.0


def test_rotation_has_unit_vorticity_pair():
    D = decompose([[0.0, -1.0], [1.0, 0.0]])
    assert np.array_equal(D.sym, np.zeros((2, 2)))
    assert np.linalg.norm(D.vorticity) == pytest.approx(2.0)
    assert np.trace(D.skew @ D.skew) == pytest.approx(-np.dot(D.vorticity, D.vorticity) / 2.0)


def test_two_dimensional_vorticity_sign():
    # M[i, j] = du_j/dx_i: du2/dx1 = 3, du1/dx2 = 1
    D = decompose([[0.0, 3.0], [1.0, 0.0]])
    assert D.vorticity.tolist() == [2.0]


def test_vorticity_packing_is_row_major():
    M = np.zeros((3, 3))
    M[0, 1], M[0, 2], M[1, 2] = 1.0, 2.0, 3.0
    D = decompose(M)
    assert D.vorticity.tolist() == [1.0, 2.0, 3.0]


def test_decomposition_reassembles(rng):
    for n in range(1, 7):
        M = rng.uniform(-10.0, 10.0, (n, n))
        D = decompose(M)
        assert np.max(np.abs(D.sym + D.skew - M)) <= 1e-14 * max(1.0, np.max(np.abs(M)))
        assert np.array_equal(D.sym, D.sym.T)
        assert np.array_equal(D.skew, -D.skew.T)
        assert np.dot(D.vorticity, D.vorticity) == pytest.approx(-2.0 * np.trace(D.skew @ D.skew))


@pytest.mark.parametrize("M", [np.zeros((2, 3)), np.zeros(4), np.zeros((0, 0))])
def test_decompose_rejects_non_square(M):
    with pytest.raises(ShapeError):
        decompose(M)


def test_decompose_rejects_non_finite():
    with pytest.raises(ValidationError):
        decompose([[np.nan, 0.0], [0.0, 1.0]])


# ==============================
# Trace identities
# ==============================


def test_trace_identities_rotation_example():
    report = trace_identities([[0.0, -1.0], [1.0, 0.0]])
    assert report.sum_lambda_m_sq == pytest.approx(-2.0)
    assert report.sum_lambda_s_sq == 0.0
    assert report.vorticity_sq == pytest.approx(4.0)
    assert report.residual_sum2 == 0.0


def test_trace_identities_diagonal_example():
    report = trace_identities(np.diag([2.0, -3.0]))
    assert report.sum_lambda_s_sq == pytest.approx(13.0)
    assert report.vorticity_sq == 0.0
    assert report.residual_sum1 == 0.0


def test_trace_identities_against_eigen_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        report = trace_identities(rng.uniform(-10.0, 10.0, (n, n)), with_oracle=True)
        assert report.residual_sum1 <= 1e-10
        assert report.residual_sum2 <= 1e-10
        assert report.oracle_residual_sum1 <= 1e-10
        scale = max(1.0, report.sum_lambda_s_sq + report.vorticity_sq)
        assert report.oracle_residual_sum2 <= 1e-10 * scale
        assert report.oracle_sum_lambda_s_sq == pytest.approx(report.sum_lambda_s_sq, rel=1e-10)


def test_oracle_fields_absent_by_default():
    report = trace_identities(np.eye(3))
    assert report.oracle_sum_lambda_m is None


def test_eigen_oracle_sums_of_a_rotation():
    sums = eigen_oracle_sums([[0.0, -1.0], [1.0, 0.0]])
    assert sums == pytest.approx((0.0, -2.0, 0.0, 0.0), abs=1e-14)


def test_trace_identities_dimension_cap():
    with pytest.raises(ShapeError):
        trace_identities(np.eye(17))


# ==============================
# Cauchy-Schwarz gap
# ==============================


@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_gap_vanishes_for_multiples_of_identity(n):
    assert cauchy_schwarz_gap(decompose(2.5 * np.eye(n))) == pytest.approx(0.0, abs=1e-12)


def test_gap_in_one_dimension_is_zero(rng):
    for value in rng.uniform(-5.0, 5.0, 20):
        assert cauchy_schwarz_gap(decompose([[value]])) == 0.0


def test_gap_example_and_sign(rng):
    assert cauchy_schwarz_gap(decompose(np.diag([1.0, -1.0]))) == pytest.approx(2.0)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        assert cauchy_schwarz_gap(decompose(rng.uniform(-10, 10, (n, n)))) >= -1e-12


def test_divergence_rhs_splits_into_majorant_and_excess(rng):
    for _ in range(50):
        n = int(rng.integers(1, 5))
        M = rng.uniform(-3.0, 3.0, (n, n))
        rho = float(rng.uniform(0.1, 3.0))
        D = decompose(M)
        majorant_part = -D.divergence ** 2 / n - (rho - 1.0)
        expected = majorant_part - majorant_excess(D) + np.dot(D.vorticity, D.vorticity) / 2.0
        assert divergence_rhs(D, rho) == pytest.approx(expected, abs=1e-10)
        assert divergence_rhs(D, rho) == pytest.approx(-np.trace(M @ M) - (rho - 1.0), abs=1e-10)


# ==============================
# Skew transport
# ==============================


def test_zero_vorticity_stays_zero(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        times, samples = _random_sym_path(rng, n)
        _, matrices = integrate_skew_path(np.zeros((n, n)), times, samples, 1.0)
        assert np.max(np.abs(matrices)) <= 1e-12


def test_skew_is_constant_without_strain(rng):
    A0 = _random_skew(rng, 3)
    times = np.array([0.0, 1.0])
    result = evolve_skew(A0, times, np.zeros((2, 3, 3)), 1.0)
    assert np.array_equal(result, A0)


def test_uniform_strain_decays_exponentially(rng):
    s = 0.7
    A0 = _random_skew(rng, 3)
    times = np.array([0.0, 2.0])
    samples = np.array([s * np.eye(3), s * np.eye(3)])
    result = evolve_skew(A0, times, samples, 2.0)
    assert np.max(np.abs(result - math.exp(-2.0 * s * 2.0) * A0)) <= 1e-8


def test_skew_symmetry_preserved_at_every_step(rng):
    A0 = _random_skew(rng, 4)
    times, samples = _random_sym_path(rng, 4, t_end=1.5)
    step_times, matrices = integrate_skew_path(A0, times, samples, 1.5)
    assert np.all(np.diff(step_times) > 0)
    for A in matrices:
        assert np.max(np.abs(A + A.T)) <= 1e-12


def test_skew_transport_shape_checks():
    with pytest.raises(ShapeError):
        evolve_skew(np.zeros((2, 2)), [0.0, 1.0], np.zeros((2, 3, 3)), 1.0)
    with pytest.raises(ValidationError):
        evolve_skew(np.ones((2, 2)), [0.0, 1.0], np.zeros((2, 2, 2)), 1.0)
