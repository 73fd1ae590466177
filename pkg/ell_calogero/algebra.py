"""Root-system data of A_n and the trigonometric spectrum.

Roots are normalized to (alpha, alpha) = 2, so the Gram matrix of the fundamental
weights is the inverse Cartan matrix. Everything here is exact (Fraction).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import List, Sequence, Tuple

from exceptions import InvalidLabelError


_LOGGER = logging.getLogger('ell_calogero')

Gram = Tuple[Tuple[Fraction, ...], ...]


def as_coupling(value) -> Fraction:
    """Coerce an int, Fraction or 'p/q' string to an exact coupling."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"coupling must be exact (int, Fraction or 'p/q'), got {value!r}")
    if isinstance(value, (Rational, str)):
        return Fraction(value)
    raise TypeError(f"unsupported coupling type {type(value).__name__}")


class EnergyConvention(str, Enum):
    """Zero point of the trigonometric energies."""
    WEYL = 'weyl'
    A1_SHIFTED = 'a1-shifted'


@dataclass(frozen=True)
class QuantumNumbers:
    """n-tuple of non-negative integers labelling a trigonometric eigenstate."""
    m: Tuple[int, ...]

    def __post_init__(self):
        m = tuple(self.m)
        if not m:
            raise InvalidLabelError("quantum numbers need at least one entry (rank >= 1)")
        for entry in m:
            if isinstance(entry, bool) or int(entry) != entry:
                raise InvalidLabelError(f"quantum numbers must be integers, got {self.m}")
            if entry < 0:
                raise InvalidLabelError(f"quantum numbers must be non-negative, got {self.m}")
        object.__setattr__(self, 'm', tuple(int(entry) for entry in m))

    @property
    def rank(self) -> int:
        return len(self.m)

    def shifted(self, delta: Sequence[int]):
        """Label m + delta, or None when an entry would be negative."""
        target = tuple(a + b for a, b in zip(self.m, delta))
        if any(entry < 0 for entry in target):
            return None
        return QuantumNumbers(target)

    def __str__(self):
        return ','.join(str(entry) for entry in self.m)


@dataclass(frozen=True)
class RankData:
    """A_n data: rank, particle count and fundamental-weight Gram matrix."""
    n: int
    N: int
    gram: Gram

    @property
    def rho(self) -> Tuple[int, ...]:
        return weyl_vector(self.n)

    @property
    def positive_roots(self) -> List[Tuple[int, int]]:
        return positive_roots(self.n)


@dataclass(frozen=True)
class TrigEnergy:
    value: Fraction
    convention: EnergyConvention


def _check_rank(n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidLabelError(f"rank must be a positive integer, got {n!r}")
    return int(n)


def cartan_matrix(n: int) -> Tuple[Tuple[int, ...], ...]:
    n = _check_rank(n)
    return tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n))
        for i in range(n)
    )


@lru_cache(maxsize=None)
def gram_fundamental(n: int) -> Gram:
    """Inner products (lambda_i, lambda_j) = min(i,j)(N - max(i,j))/N of the fundamental weights."""
    n = _check_rank(n)
    N = n + 1
    return tuple(
        tuple(Fraction(min(i, j) * (N - max(i, j)), N) for j in range(1, n + 1))
        for i in range(1, n + 1)
    )


def weyl_vector(n: int) -> Tuple[int, ...]:
    """rho in the fundamental-weight basis (the sum of all fundamental weights)."""
    return (1,) * _check_rank(n)


def positive_roots(n: int) -> List[Tuple[int, int]]:
    """R+ as pairs (i, j), i < j, standing for eps_i - eps_j."""
    N = _check_rank(n) + 1
    return [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]


@lru_cache(maxsize=None)
def rank_data(n: int) -> RankData:
    n = _check_rank(n)
    return RankData(n=n, N=n + 1, gram=gram_fundamental(n))


def inner(a: Sequence, b: Sequence, gram: Gram) -> Fraction:
    """(a, b) for weights given in the fundamental-weight basis."""
    return sum((Fraction(a[i]) * gram[i][j] * b[j] for i in range(len(a)) for j in range(len(b)) if a[i] and b[j]),
               Fraction(0))


def _as_label(m, n: int) -> QuantumNumbers:
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    if label.rank != n:
        raise InvalidLabelError(f"quantum numbers {label.m} do not match rank {n}")
    return label


def trig_energy(m, kappa, n: int, convention=EnergyConvention.WEYL) -> TrigEnergy:
    """Trigonometric energy 2(lambda + kappa rho, lambda + kappa rho) or its rank-1 shifted form."""
    convention = EnergyConvention(convention)
    n = _check_rank(n)
    label = _as_label(m, n)
    kappa = as_coupling(kappa)

    if convention is EnergyConvention.A1_SHIFTED:
        if n != 1:
            raise InvalidLabelError(f"the '{convention.value}' convention exists for rank 1 only, got rank {n}")
        (mm,) = label.m
        return TrigEnergy(Fraction(mm * mm) + 2 * kappa * mm - kappa * kappa, convention)

    shifted = [Fraction(mi) + kappa for mi in label.m]
    return TrigEnergy(2 * inner(shifted, shifted, gram_fundamental(n)), convention)


def trig_energy_gap(m, m_prime, kappa, n: int) -> Fraction:
    """E(m) - E(m'); the zero-point convention cancels."""
    n = _check_rank(n)
    first, second = _as_label(m, n), _as_label(m_prime, n)
    if first == second:
        return Fraction(0)
    return trig_energy(first, kappa, n).value - trig_energy(second, kappa, n).value
