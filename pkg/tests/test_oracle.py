import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import linalg

from oracle import (BandedOperator, bracket_exact, bracket_quadrature, build_hamiltonian, build_z1, chebyshev_t,
                    converged_levels, cos_operator, delta2_a1_states, g3_scaling_study, lowest_eigenvalues,
                    monic_jacobi, norm_quadrature_check)
from perturbation import c_a1, delta1_a1_closed, delta2_a1_bracket, delta2_a1_recurrence
from exceptions import ConvergenceError, InvalidLabelError, TruncationError

TOL = 1e-12
CUBIC_RATIO = (6.0, 10.0)


def test_z1_entries():
    Z = build_z1(3, 2)
    np.testing.assert_allclose(Z.diag, [0.0, 0.0, 0.0])
    np.testing.assert_allclose(Z.offdiag, [math.sqrt(2.0 / 3.0), math.sqrt(5.0 / 6.0)], rtol=TOL)
    assert np.array_equal(Z.dense(), Z.dense().T)


def test_z1_errors():
    with pytest.raises(TruncationError):
        build_z1(1, 2)
    with pytest.raises(InvalidLabelError):
        build_z1(4, 0)


def test_chebyshev_identity():
    Z = build_z1(12, Fraction(5, 2)).dense()
    T = chebyshev_t(4, Z)
    np.testing.assert_allclose(T[0], np.eye(12))
    np.testing.assert_allclose(T[1], Z / 2.0)
    # T_2(x) = 2x^2 - 1
    np.testing.assert_allclose(T[2], Z @ Z / 2.0 - np.eye(12), atol=TOL)


def test_cos_operator_bandwidth():
    Z = build_z1(10, 2)
    op = cos_operator(2, Z)
    assert op.bandwidth == 4
    assert np.allclose(np.triu(op.matrix, 5), 0.0)
    with pytest.raises(TruncationError):
        cos_operator(5, Z)
    with pytest.raises(InvalidLabelError):
        cos_operator(-1, Z)


def test_lower_banded_storage():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(6, 6))
    A = A + A.T
    A = np.triu(np.tril(A, 2), -2)
    op = BandedOperator(matrix=A, bandwidth=2)
    np.testing.assert_allclose(lowest_eigenvalues(op, 6), np.linalg.eigvalsh(A), rtol=1e-12, atol=1e-12)


def test_two_by_two():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(lowest_eigenvalues(BandedOperator(A, 1), 2), [1.0, 3.0], rtol=TOL)
    with pytest.raises(TruncationError):
        lowest_eigenvalues(BandedOperator(A, 1), 3)


def test_trigonometric_limit():
    kappa = Fraction(5, 2)
    op = build_hamiltonian(20, kappa, 0.0, 4)
    shift = -float(kappa * (kappa - 1)) / 3.0
    expected = [(m + float(kappa)) ** 2 + shift for m in range(20)]
    np.testing.assert_allclose(np.diag(op.matrix), expected, rtol=TOL)
    assert np.count_nonzero(op.matrix - np.diag(np.diag(op.matrix))) == 0


def test_hamiltonian_is_symmetric_and_banded():
    op = build_hamiltonian(30, 3, 0.05, 3)
    assert np.array_equal(op.matrix, op.matrix.T)
    assert op.bandwidth == 6
    assert np.allclose(np.triu(op.matrix, 7), 0.0)


def test_free_case_is_unperturbed():
    levels, _, _ = converged_levels(1, 0.01, 40, 6, 3)
    np.testing.assert_allclose(levels, [1.0, 4.0, 9.0], rtol=TOL)


def test_second_order_ground_state():
    kappa = Fraction(3)
    g = 1e-5
    levels, _, _ = converged_levels(kappa, g, 60, 8, 1)
    expected = 7.0 + float(delta1_a1_closed(0, kappa)) * g + float(delta2_a1_recurrence(0, kappa)) * g * g
    assert abs(levels[0] - expected) < 1e-10


@pytest.mark.parametrize('m', [0, 1])
def test_g3_scaling(m):
    report = g3_scaling_study(Fraction(5, 2), m, [1e-3, 2e-3], 80, 10)
    assert report.ratios[0] is None
    assert [len(levels) for levels in report.levels] == [m + 1, m + 1]
    assert [levels[m] for levels in report.levels] == report.numerical
    assert CUBIC_RATIO[0] <= report.ratios[1] <= CUBIC_RATIO[1]
    assert max(report.basis_changes) < report.tolerance
    assert max(report.potential_changes) < report.tolerance


def test_monitor_failure():
    with pytest.raises(ConvergenceError):
        converged_levels(Fraction(5, 2), 0.5, 4, 1, 1)


@pytest.mark.parametrize('m', range(1, 6))
def test_norm_ratios(m):
    assert norm_quadrature_check(m, 3) < 1e-8


def test_norm_ratio_needs_excited_state():
    with pytest.raises(InvalidLabelError):
        norm_quadrature_check(0, 2)


def test_monic_jacobi():
    J = monic_jacobi(4, 2)
    assert J[1, 0] == 1
    assert J[0, 1] == c_a1(1, 2) == Fraction(2, 3)
    assert J[2, 1] == 1
    assert J[0, 0] == 0


@pytest.mark.parametrize('kappa', [Fraction(2), Fraction(5, 2), Fraction(3)])
def test_brackets(kappa):
    for m in range(6):
        expected = delta2_a1_bracket(m, kappa)
        assert bracket_exact(m, kappa) == expected
        assert bracket_quadrature(m, kappa) == pytest.approx(float(expected), rel=1e-8)


@pytest.mark.parametrize('kappa', [Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7)])
def test_sum_over_states(kappa):
    for m in range(11):
        assert delta2_a1_states(m, kappa) == delta2_a1_recurrence(m, kappa)
    assert delta2_a1_states(3, 1) == 0


def test_banded_solver_matches_dense():
    op = build_hamiltonian(40, Fraction(5, 2), 0.05, 6)
    dense = linalg.eigvalsh(op.matrix)[:4]
    np.testing.assert_allclose(lowest_eigenvalues(op, 4), dense, rtol=1e-12)
