from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy

from algebra import QuantumNumbers, trig_energy
from jack import (Partition, SymmetricPolynomial, a_coefficient, cm_frame_energy, dominates, elementary_from_coordinates,
                  jack_polynomial, multiply_e1, multiply_e_last, mu_vector, partition_keys, partition_to_quantum,
                  partitions_below, quantum_to_partition, recurrence_table, sekiguchi_eigenvalue)
from perturbation import closed_recurrence_table
from exceptions import InvalidLabelError

TOL = 1e-10
KAPPAS = [Fraction(1, 2), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(7)]


def _labels(rank, limit):
    return [m for m in product(range(limit + 1), repeat=rank) if sum(m) <= limit]


def test_partition_validation():
    assert Partition.from_parts((2, 1), 4).parts == (2, 1, 0, 0)
    assert Partition((3, 3, 1)).canonical().parts == (2, 2, 0)
    for bad in ((1, 2), (1, -1), ()):
        with pytest.raises(InvalidLabelError):
            Partition(bad)
    with pytest.raises(InvalidLabelError):
        Partition.from_parts((1, 1, 1), 2)


def test_partition_keys():
    assert partition_keys(4, 2) == ((4, 0), (3, 1), (2, 2))
    assert partition_keys(0, 3) == ((0, 0, 0),)
    assert partition_keys(5, 2, 2) == ()
    assert len(partition_keys(6, 6)) == 11


def test_dominance():
    assert dominates((3, 1, 0), (2, 2, 0))
    assert not dominates((2, 2, 0), (3, 1, 0))
    assert partitions_below((2, 1, 0)) == ((2, 1, 0), (1, 1, 1))
    # (3,1,1,1) and (2,2,2,0) are incomparable
    assert (2, 2, 2, 0) not in partitions_below((3, 1, 1, 1))


@pytest.mark.parametrize('m', [(0,), (4,), (1, 2), (0, 3), (2, 0, 1)])
def test_label_partition_bijection(m):
    N = len(m) + 1
    partition = quantum_to_partition(m, N)
    assert partition.parts[-1] == 0
    assert partition_to_quantum(partition, N) == QuantumNumbers(m)
    # adding full columns does not change the label
    assert partition_to_quantum(tuple(p + 2 for p in partition.parts), N) == QuantumNumbers(m)


def test_rank1_jack():
    kappa = Fraction(3)
    P = jack_polynomial((2, 0), kappa)
    assert dict(P.terms) == {(2, 0): 1, (1, 1): 2 * kappa / (kappa + 1)}
    assert P.leading == (2, 0)
    assert P.coefficient((0, 2)) == 0


def test_jack_needs_positive_coupling():
    with pytest.raises(InvalidLabelError):
        jack_polynomial((1, 0), 0)
    with pytest.raises(InvalidLabelError):
        jack_polynomial((1,), 2)


def _schur(parts, n_vars):
    """Bialternant a_{lambda+delta} / a_delta, expanded in monomials."""
    xs = sympy.symbols(f'x0:{n_vars}')
    numerator = sympy.Matrix(n_vars, n_vars, lambda i, j: xs[i] ** (parts[j] + n_vars - 1 - j)).det()
    vandermonde = sympy.Matrix(n_vars, n_vars, lambda i, j: xs[i] ** (n_vars - 1 - j)).det()
    quotient = sympy.Poly(sympy.cancel(numerator / vandermonde), *xs)
    return {key: Fraction(int(c.p), int(c.q)) for key, c in quotient.terms()
            if list(key) == sorted(key, reverse=True)}


@pytest.mark.parametrize('parts', [(2, 0, 0), (2, 1, 0), (3, 1, 0), (2, 2, 0), (3, 2, 1)])
def test_kappa_one_gives_schur(parts):
    P = jack_polynomial(parts, 1, N=3)
    assert dict(P.terms) == _schur(parts, 3)


def _torus_points(N, grid):
    """x_N = 1 and the other N-1 angles on a uniform grid."""
    theta = 2.0 * np.pi * np.arange(grid) / grid
    angles = np.meshgrid(*([theta] * (N - 1)), indexing='ij')
    return np.stack([np.exp(1j * t) for t in angles] + [np.ones_like(angles[0])], axis=-1)


@pytest.mark.parametrize('kappa', [Fraction(1), Fraction(2), Fraction(3)])
@pytest.mark.parametrize('N', [2, 3])
def test_orthogonality_on_torus(N, kappa):
    """<P_lambda, P_mu> vanishes for lambda != mu under |prod_{j<k} (x_j - x_k)|^{2 kappa}.

    Equal degrees only: the integrand is then invariant under a common phase, so x_N can be fixed.
    The grid integrates every frequency that occurs exactly.
    """
    x = _torus_points(N, 48)
    weight = np.ones(x.shape[:-1])
    for j in range(N):
        for k in range(j + 1, N):
            weight = weight * np.abs(x[..., j] - x[..., k]) ** (2 * float(kappa))

    for size in range(1, 5):
        keys = partition_keys(size, N)
        values = [jack_polynomial(key, kappa, N=N).evaluate(x) for key in keys]
        gram = np.array([[np.mean(weight * a * np.conj(b)) for b in values] for a in values])
        norms = np.sqrt(np.abs(np.diag(gram)))
        assert np.all(norms > 0.0)
        overlaps = np.abs(gram) / np.outer(norms, norms)
        np.fill_diagonal(overlaps, 0.0)
        assert overlaps.max() < 1e-10


@pytest.mark.parametrize('kappa', KAPPAS)
@pytest.mark.parametrize('parts', [(3, 0), (2, 1, 0), (3, 1, 0), (2, 1, 1, 0), (4, 2, 1, 0)])
def test_eigenvalue_consistency(parts, kappa):
    N = len(parts)
    m = partition_to_quantum(parts, N)
    assert cm_frame_energy(parts, kappa) == trig_energy(m, kappa, N - 1).value
    top = sekiguchi_eigenvalue(parts, kappa)
    assert all(top > sekiguchi_eigenvalue(mu, kappa) for mu in partitions_below(parts)[1:])


def test_multiply_e1_rank1():
    kappa = Fraction(2)
    P = jack_polynomial((1, 0), kappa)
    expansion = multiply_e1(P, kappa)
    # z P_1 = P_2 + c_1 P_0 with c_1 = 2 kappa / (kappa (kappa + 1))
    assert expansion == {Partition((2, 0)): 1, Partition((0, 0)): Fraction(2, 3)}


def test_multiply_e_last_a2():
    kappa = Fraction(3)
    P = jack_polynomial((1, 0, 0), kappa)
    expansion = multiply_e_last(P, kappa)
    assert set(expansion) == {Partition((2, 1, 0)), Partition((0, 0, 0))}
    assert expansion[Partition((2, 1, 0))] == 1


def test_pieri_rejects_foreign_polynomial():
    P = SymmetricPolynomial(2, {(2, 0): 1, (1, 1): 5})
    with pytest.raises(InvalidLabelError):
        multiply_e1(P, 2)


def test_mu_vectors():
    assert [mu_vector(j, 3) for j in range(1, 5)] == [(1, 0, 0), (-1, 1, 0), (0, -1, 1), (0, 0, -1)]
    with pytest.raises(InvalidLabelError):
        mu_vector(0, 2)


@pytest.mark.parametrize('kappa', KAPPAS)
@pytest.mark.parametrize('rank,limit', [(1, 8), (2, 4), (3, 2)])
def test_closed_tables_match(rank, limit, kappa):
    for m in _labels(rank, limit):
        assert recurrence_table(m, kappa, rank) == closed_recurrence_table(m, kappa)


@pytest.mark.parametrize('kappa', KAPPAS)
@pytest.mark.parametrize('rank,limit', [(1, 6), (2, 4), (3, 2)])
def test_duality(rank, limit, kappa):
    """c~_{j,m} = c_{N+1-j, m*} with m* the reversed label."""
    N = rank + 1
    for m in _labels(rank, limit):
        table = recurrence_table(m, kappa, rank)
        mirrored = recurrence_table(tuple(reversed(m)), kappa, rank)
        assert [table.c_tilde(j) for j in range(1, N + 1)] == [mirrored.c(N + 1 - j) for j in range(1, N + 1)]


@pytest.mark.parametrize('rank', [1, 2, 3])
def test_invalid_targets_vanish(rank):
    table = recurrence_table((0,) * rank, Fraction(5, 2), rank)
    assert all(c == 0 for _, c in table.up[1:])
    assert all(c == 0 for _, c in table.down[:-1])
    assert table.c(1) == table.c_tilde(rank + 1) == 1


@pytest.mark.parametrize('rank', [1, 2, 3])
def test_free_coefficients(rank):
    for m in _labels(rank, 3):
        table = recurrence_table(m, 1, rank)
        assert all(c in (0, 1) for _, c in table.up + table.down)


def test_a_coefficient_values():
    assert a_coefficient((0,), 2, 1) == Fraction(2, 3)
    assert a_coefficient((1,), 2, 1) == Fraction(3, 2)
    # free fermions: a_m counts the admissible lowering directions
    assert a_coefficient((0, 0), 1, 2) == 1
    assert a_coefficient((1, 1), 1, 2) == 3


def test_elementary_from_coordinates():
    rng = np.random.default_rng(7)
    q = rng.uniform(0.0, np.pi, size=3)
    x = np.exp(2j * q)
    z = elementary_from_coordinates(q)
    np.testing.assert_allclose(z[0], x.sum(), atol=TOL)
    np.testing.assert_allclose(z[1], x[0] * x[1] + x[0] * x[2] + x[1] * x[2], atol=TOL)
    np.testing.assert_allclose(z[2], x.prod(), atol=TOL)
