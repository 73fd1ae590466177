"""Numerical diagonalization of the two-particle (Lame) elliptic problem.

The Hamiltonian is assembled in the orthonormalized trigonometric eigenbasis,
where H_trig is diagonal and every V_p is banded through the Chebyshev identity
cos(2h q) = T_2h(z/2), z = 2 cos q acting as a tridiagonal operator.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np
import sympy
from scipy import integrate, linalg

from algebra import as_coupling, trig_energy, trig_energy_gap
from elliptic import divisors
from perturbation import c_a1, const_shift, energy_expansion
from exceptions import ConvergenceError, InvalidLabelError, TruncationError


_LOGGER = logging.getLogger('ell_calogero')

_MONITOR_TOLERANCE = 1e-12
_QUADRATURE_LIMIT = 200
_QUADRATURE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix stored by its diagonals."""
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class BandedOperator:
    """Symmetric matrix with a known half-bandwidth."""
    matrix: np.ndarray
    bandwidth: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def lower_banded(self) -> np.ndarray:
        """LAPACK lower storage, ab[d, j] = A[j + d, j]."""
        M = self.dim
        ab = np.zeros((self.bandwidth + 1, M))
        for d in range(self.bandwidth + 1):
            ab[d, :M - d] = np.diagonal(self.matrix, -d)
        return ab


@dataclass
class OracleReport:
    kappa: Fraction
    m: int
    basis_size: int
    p_max: int
    d2_form: str
    g_list: List[float] = field(default_factory=list)
    levels: List[List[float]] = field(default_factory=list)
    numerical: List[float] = field(default_factory=list)
    perturbative: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    ratios: List[Optional[float]] = field(default_factory=list)
    basis_changes: List[float] = field(default_factory=list)
    potential_changes: List[float] = field(default_factory=list)
    tolerance: float = _MONITOR_TOLERANCE


def _positive_coupling(kappa) -> Fraction:
    kappa = as_coupling(kappa)
    if kappa <= 0:
        raise InvalidLabelError(f"the trigonometric basis needs kappa > 0, got {kappa}")
    return kappa


def build_z1(M: int, kappa) -> TridiagonalOperator:
    """z_1 in the orthonormal basis: zero diagonal, (m, m+1) entry sqrt(c_{m+1})."""
    if M < 2:
        raise TruncationError(f"basis size must be at least 2, got {M}")
    kappa = _positive_coupling(kappa)
    coefficients = [c_a1(m + 1, kappa) for m in range(M - 1)]
    negative = [m + 1 for m, c in enumerate(coefficients) if c < 0]
    if negative:
        raise InvalidLabelError(f"c_m < 0 at m={negative[0]} for kappa={kappa}")
    return TridiagonalOperator(diag=np.zeros(M), offdiag=np.sqrt(np.array([float(c) for c in coefficients])))


def chebyshev_t(k_max: int, Z: np.ndarray) -> List[np.ndarray]:
    """[T_0(Z/2), ..., T_k_max(Z/2)] from T_{k+1} = Z T_k - T_{k-1}."""
    identity = np.eye(Z.shape[0])
    powers = [identity, Z / 2.0]
    for _ in range(1, k_max):
        powers.append(Z @ powers[-1] - powers[-2])
    return powers[:k_max + 1]


def cos_operator(h: int, Z: TridiagonalOperator) -> BandedOperator:
    """cos(2h q) as T_2h(Z/2), half-bandwidth 2h."""
    if h < 0:
        raise InvalidLabelError(f"harmonic must be non-negative, got {h}")
    if 2 * h >= Z.dim:
        raise TruncationError(f"bandwidth {2 * h} does not fit a basis of size {Z.dim}")
    return BandedOperator(matrix=chebyshev_t(2 * h, Z.dense())[2 * h], bandwidth=2 * h)


def build_hamiltonian(M: int, kappa, g: float, p_max: int) -> BandedOperator:
    """H = diag(E_trig) + const_shift + kappa(kappa-1) sum_p g^p 8 sum_{h|p} h (I - cos 2hq)."""
    kappa = _positive_coupling(kappa)
    if not 0.0 <= g < 1.0:
        raise InvalidLabelError(f"the nome must satisfy 0 <= g < 1, got {g}")
    if p_max < 1:
        raise TruncationError(f"p_max must be at least 1, got {p_max}")

    # matrix elements of the first M rows are exact when built with 2 p_max spare states
    D = M + 2 * p_max
    Z = build_z1(D, kappa)
    T = chebyshev_t(2 * p_max, Z.dense())
    identity = T[0]

    potential = np.zeros((D, D))
    if g > 0.0:
        for p in range(1, p_max + 1):
            v = np.zeros((D, D))
            for h in divisors(p).divisors:
                v += h * (identity - T[2 * h])
            potential += g ** p * 8.0 * v

    shift = const_shift(2, kappa)
    energies = np.array([float(trig_energy((m,), kappa, 1).value + shift) for m in range(M)])
    H = np.diag(energies) + float(kappa * (kappa - 1)) * potential[:M, :M]
    H = 0.5 * (H + H.T)
    return BandedOperator(matrix=H, bandwidth=min(2 * p_max, M - 1))


def lowest_eigenvalues(op: BandedOperator, k: int) -> np.ndarray:
    """k smallest eigenvalues, ascending, each polished by its Rayleigh quotient."""
    if not 1 <= k <= op.dim:
        raise TruncationError(f"requested {k} eigenvalues of a {op.dim}-dimensional operator")
    try:
        w, v = linalg.eig_banded(op.lower_banded(), lower=True, select='i', select_range=(0, k - 1))
    except (linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f"banded eigensolver failed: {e}") from e

    polished = np.array([v[:, i] @ (op.matrix @ v[:, i]) / (v[:, i] @ v[:, i]) for i in range(k)])
    return np.sort(polished)


def converged_levels(kappa, g: float, M: int, p_max: int, k: int, tol: float = _MONITOR_TOLERANCE):
    """Lowest k levels with both truncation monitors; returns (levels, basis change, potential change)."""
    levels = lowest_eigenvalues(build_hamiltonian(M, kappa, g, p_max), k)
    doubled = lowest_eigenvalues(build_hamiltonian(2 * M, kappa, g, p_max), k)
    extended = lowest_eigenvalues(build_hamiltonian(M, kappa, g, p_max + 4), k)

    scale = np.maximum(1.0, np.abs(levels))
    basis_change = float(np.max(np.abs(doubled - levels) / scale))
    potential_change = float(np.max(np.abs(extended - levels) / scale))
    _LOGGER.debug(f"oracle kappa={kappa} g={g} M={M} p_max={p_max}: "
                  f"basis change {basis_change:.3g}, potential change {potential_change:.3g}")
    if basis_change >= tol:
        raise ConvergenceError(f"doubling the basis from {M} moved the levels by {basis_change:.3g} (tolerance {tol:.3g})")
    if potential_change >= tol:
        raise ConvergenceError(f"raising p_max from {p_max} moved the levels by {potential_change:.3g} (tolerance {tol:.3g})")
    return levels, basis_change, potential_change


def g3_scaling_study(kappa, m: int, g_list: Sequence[float], M: int, p_max: int,
                     d2_form: str = 'recurrence') -> OracleReport:
    """Residuals of the second-order expansion against diagonalization, with r(g_i)/r(g_{i-1})."""
    kappa = _positive_coupling(kappa)
    expansion = energy_expansion((m,), kappa, 1, order=2, d2_form=d2_form)
    report = OracleReport(kappa=kappa, m=m, basis_size=M, p_max=p_max, d2_form=d2_form)

    previous = None
    for g in g_list:
        levels, basis_change, potential_change = converged_levels(kappa, g, M, p_max, m + 1)
        numerical = float(levels[m])
        perturbative = expansion.evaluate(g)
        residual = abs(numerical - perturbative)

        report.g_list.append(float(g))
        report.levels.append([float(x) for x in levels])
        report.numerical.append(numerical)
        report.perturbative.append(perturbative)
        report.residuals.append(residual)
        report.ratios.append(residual / previous if previous else None)
        report.basis_changes.append(basis_change)
        report.potential_changes.append(potential_change)
        previous = residual
    return report


def _weight(q: float, kappa: float) -> float:
    return math.sin(q) ** (2.0 * kappa)


def _monic_polynomial(m: int, z: float, c: Sequence[float]) -> float:
    """p_m(z) from p_{k+1} = z p_k - c_k p_{k-1}, p_0 = 1."""
    previous, current = 0.0, 1.0
    for k in range(m):
        previous, current = current, z * current - (c[k] * previous if k else 0.0)
    return current


def _quad(func) -> float:
    value, error = integrate.quad(func, 0.0, math.pi, limit=_QUADRATURE_LIMIT, epsabs=0.0, epsrel=1e-12)
    if not math.isfinite(value) or error > _QUADRATURE_TOLERANCE * max(1.0, abs(value)):
        raise ConvergenceError(f"quadrature did not converge: value {value}, error estimate {error:.3g}")
    return value


def _float_coefficients(m: int, kappa: Fraction) -> List[float]:
    return [float(c_a1(k, kappa)) for k in range(m + 1)]


def norm_quadrature_check(m: int, kappa) -> float:
    """|(||psi_m||^2 / ||psi_{m-1}||^2) / c_m - 1| with norms from quadrature."""
    if m < 1:
        raise InvalidLabelError(f"the norm ratio needs m >= 1, got {m}")
    kappa = _positive_coupling(kappa)
    c = _float_coefficients(m, kappa)
    k = float(kappa)

    def norm(level):
        return _quad(lambda q: _weight(q, k) * _monic_polynomial(level, 2.0 * math.cos(q), c) ** 2)

    ratio = norm(m) / norm(m - 1)
    return abs(ratio / c[m] - 1.0)


def monic_jacobi(dim: int, kappa) -> sympy.Matrix:
    """Exact matrix of z_1 on the monic basis: J[m+1, m] = 1, J[m-1, m] = c_m."""
    kappa = as_coupling(kappa)

    def entry(i, j):
        if i == j + 1:
            return sympy.Integer(1)
        if i == j - 1:
            c = c_a1(j, kappa)
            return sympy.Rational(c.numerator, c.denominator)
        return sympy.Integer(0)

    return sympy.Matrix(dim, dim, entry)


def _as_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def bracket_exact(m: int, kappa) -> Fraction:
    """Diagonal element of 4 + 7 J^2 - 2 J^4 at row m."""
    kappa = _positive_coupling(kappa)
    J = monic_jacobi(m + 3, kappa)
    J2 = J * J
    return _as_fraction(4 + 7 * J2[m, m] - 2 * (J2 * J2)[m, m])


def bracket_quadrature(m: int, kappa) -> float:
    """<4 + 7 z^2 - 2 z^4> in the state m by quadrature."""
    kappa = _positive_coupling(kappa)
    c = _float_coefficients(m, kappa)
    k = float(kappa)

    def density(q):
        return _weight(q, k) * _monic_polynomial(m, 2.0 * math.cos(q), c) ** 2

    def observable(q):
        z2 = (2.0 * math.cos(q)) ** 2
        return (4.0 + 7.0 * z2 - 2.0 * z2 * z2) * density(q)

    return _quad(observable) / _quad(density)


def delta2_a1_states(m: int, kappa) -> Fraction:
    """Second-order coefficient from the sum over intermediate states, exact."""
    kappa = as_coupling(kappa)
    if kappa * (kappa - 1) == 0:
        return Fraction(0)
    kappa = _positive_coupling(kappa)
    k1 = kappa * (kappa - 1)

    dim = m + 5
    J = monic_jacobi(dim, kappa)
    J2 = J * J
    coupled = Fraction(0)
    for n in range(max(0, m - 2), m + 3):
        if n == m:
            continue
        weight = _as_fraction(J2[n, m] * J2[m, n])
        if weight:
            coupled += weight / trig_energy_gap((m,), (n,), kappa, 1)
    return 4 * k1 * bracket_exact(m, kappa) + 16 * k1 * k1 * coupled
