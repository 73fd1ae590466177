"""Generalized Gegenbauer (Jack) polynomials of A_n over exact rationals.

P_lambda is built in the monomial basis as the monic, dominance-triangular
eigenfunction of the Sekiguchi (Laplace-Beltrami) operator

    D = sum_j (x_j d/dx_j)^2 + kappa sum_{j<k} (x_j + x_k)/(x_j - x_k) (x_j d/dx_j - x_k d/dx_k)

and the recurrence coefficients come from expanding e_1 P and e_{N-1} P back in
the same basis. kappa is always a Fraction; every cache below is keyed on it.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy.utilities.iterables import multiset_permutations, partitions

from algebra import QuantumNumbers, as_coupling, inner, gram_fundamental
from exceptions import InvalidLabelError, PoleError, InternalError


_LOGGER = logging.getLogger('ell_calogero')

PartitionKey = Tuple[int, ...]


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing parts, padded with zeros to the number of variables."""
    parts: PartitionKey

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise InvalidLabelError("a partition needs at least one (possibly zero) part")
        if any(p < 0 for p in parts):
            raise InvalidLabelError(f"partition parts must be non-negative, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidLabelError(f"partition parts must be weakly decreasing, got {parts}")
        object.__setattr__(self, 'parts', parts)

    @classmethod
    def from_parts(cls, parts: Sequence[int], n_vars: int):
        parts = [p for p in parts if p]
        if len(parts) > n_vars:
            raise InvalidLabelError(f"partition {tuple(parts)} has more than {n_vars} parts")
        return cls(tuple(parts) + (0,) * (n_vars - len(parts)))

    @property
    def n_vars(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    def canonical(self):
        """Remove full columns (divide by e_N), leaving a zero last part."""
        return Partition(_canonical_key(self.parts))


@dataclass(frozen=True)
class SymmetricPolynomial:
    """Exact expansion in monomial symmetric functions m_mu of n_vars variables."""
    n_vars: int
    terms: Mapping[PartitionKey, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for key, coeff in self.terms.items():
            key = tuple(key)
            if len(key) != self.n_vars:
                key = Partition.from_parts(key, self.n_vars).parts
            if coeff:
                cleaned[key] = Fraction(coeff)
        object.__setattr__(self, 'terms', MappingProxyType(dict(sorted(cleaned.items(), reverse=True))))

    @property
    def leading(self) -> Optional[PartitionKey]:
        return next(iter(self.terms), None)

    def coefficient(self, key: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(key), Fraction(0))

    def evaluate(self, x) -> np.ndarray:
        """Numeric value at points x of shape (..., n_vars)."""
        x = np.asarray(x, dtype=complex)
        total = np.zeros(x.shape[:-1], dtype=complex)
        for key, coeff in self.terms.items():
            total += float(coeff) * _monomial_symmetric(x, key)
        return total

    def to_records(self):
        return [{'partition': list(key), 'coeff': str(coeff)} for key, coeff in self.terms.items()]


@dataclass(frozen=True)
class RecurrenceTable:
    """c_{j,m} (multiplication by z_1) and c~_{j,m} (multiplication by z_n), j = 1..N."""
    m: QuantumNumbers
    up: Tuple[Tuple[int, Fraction], ...]
    down: Tuple[Tuple[int, Fraction], ...]

    def c(self, j: int) -> Fraction:
        return self.up[j - 1][1]

    def c_tilde(self, j: int) -> Fraction:
        return self.down[j - 1][1]


def _canonical_key(parts: PartitionKey) -> PartitionKey:
    last = parts[-1]
    return tuple(p - last for p in parts) if last else parts


def _monomial_symmetric(x: np.ndarray, key: PartitionKey) -> np.ndarray:
    value = np.zeros(x.shape[:-1], dtype=complex)
    for exponents in _orbit(key):
        value += np.prod(x ** np.array(exponents), axis=-1)
    return value


@lru_cache(maxsize=None)
def _orbit(key: PartitionKey) -> Tuple[PartitionKey, ...]:
    return tuple(tuple(a) for a in multiset_permutations(list(key)))


def dominates(first: Sequence[int], second: Sequence[int]) -> bool:
    """True when first >= second in dominance order (equal sizes assumed)."""
    lead = trail = 0
    for a, b in zip(first, second):
        lead += a
        trail += b
        if lead < trail:
            return False
    return True


@lru_cache(maxsize=None)
def partition_keys(size: int, n_vars: int, max_part: Optional[int] = None) -> Tuple[PartitionKey, ...]:
    """All partitions of size with at most n_vars parts, decreasing lexicographic order."""
    if size == 0:
        return ((0,) * n_vars,)
    if max_part is not None and max_part * n_vars < size:
        return ()
    keys = []
    for p in partitions(size, m=n_vars, k=max_part):
        parts = sorted((part for part, mult in p.items() for _ in range(mult)), reverse=True)
        if sum(parts) == size and parts:
            keys.append(tuple(parts) + (0,) * (n_vars - len(parts)))
    return tuple(sorted(set(keys), reverse=True))


@lru_cache(maxsize=None)
def partitions_below(key: PartitionKey) -> Tuple[PartitionKey, ...]:
    """Partitions dominated by key (key first), decreasing lexicographic order."""
    return tuple(mu for mu in partition_keys(sum(key), len(key), key[0]) if dominates(key, mu))


def quantum_to_partition(m, N: int) -> Partition:
    """lambda_i = sum_{k >= i} m_k with lambda_N = 0."""
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    if label.rank != N - 1:
        raise InvalidLabelError(f"quantum numbers {label.m} do not describe {N} particles")
    parts = [sum(label.m[i:]) for i in range(label.rank)] + [0]
    return Partition(tuple(parts))


def partition_to_quantum(partition, N: int) -> QuantumNumbers:
    """m_i = lambda_i - lambda_{i+1}; full columns drop out."""
    parts = partition.parts if isinstance(partition, Partition) else tuple(partition)
    parts = Partition.from_parts(parts, N).parts
    return QuantumNumbers(tuple(parts[i] - parts[i + 1] for i in range(N - 1)))


@lru_cache(maxsize=None)
def _sekiguchi_column(nu: PartitionKey):
    """Action of D on m_nu: (sum nu^2, diagonal kappa-part, off-diagonal kappa-parts)."""
    n = len(nu)
    diag_squares = sum(p * p for p in nu)
    diag_pairs = sum(nu[j] - nu[k] for j in range(n) for k in range(j + 1, n))
    off = defaultdict(int)
    for a in _orbit(nu):
        for j in range(n):
            for k in range(j + 1, n):
                d = a[j] - a[k]
                for t in range(1, d):
                    b = list(a)
                    b[j] -= t
                    b[k] += t
                    if all(b[i] >= b[i + 1] for i in range(n - 1)):
                        off[tuple(b)] += 2 * d
    return diag_squares, diag_pairs, MappingProxyType(dict(off))


def sekiguchi_eigenvalue(partition, kappa) -> Fraction:
    """sum_j lambda_j^2 + kappa sum_j (N + 1 - 2j) lambda_j."""
    key = partition.parts if isinstance(partition, Partition) else tuple(partition)
    squares, pairs, _ = _sekiguchi_column(key)
    return squares + as_coupling(kappa) * pairs


def cm_frame_energy(partition, kappa) -> Fraction:
    """Trigonometric energy of P_lambda with the centre-of-mass motion removed."""
    key = partition.parts if isinstance(partition, Partition) else tuple(partition)
    kappa = as_coupling(kappa)
    N = len(key)
    ones = (1,) * (N - 1)
    rho_sq = inner(ones, ones, gram_fundamental(N - 1))
    return 2 * (sekiguchi_eigenvalue(key, kappa) - Fraction(sum(key) ** 2, N)) + 2 * kappa * kappa * rho_sq


def _check_kappa(kappa) -> Fraction:
    kappa = as_coupling(kappa)
    if kappa <= 0:
        raise InvalidLabelError(f"the Jack construction needs kappa > 0, got {kappa}")
    return kappa


@lru_cache(maxsize=None)
def _jack_terms(key: PartitionKey, kappa: Fraction) -> Mapping[PartitionKey, Fraction]:
    basis = partitions_below(key)
    e_top = sekiguchi_eigenvalue(key, kappa)
    coeffs = {key: Fraction(1)}
    for mu in basis[1:]:
        gap = e_top - sekiguchi_eigenvalue(mu, kappa)
        if gap == 0:
            raise PoleError(f"e{key} - e{mu} vanishes at kappa = {kappa}", factor=f"e{key} - e{mu}")
        total = 0
        for nu, u in coeffs.items():
            weight = _sekiguchi_column(nu)[2].get(mu)
            if weight:
                total += u * weight
        if total:
            coeffs[mu] = kappa * total / gap
    _LOGGER.debug(f"Jack polynomial {key} at kappa={kappa}: {len(coeffs)} monomials")
    return MappingProxyType(coeffs)


def jack_polynomial(partition, kappa, N: Optional[int] = None) -> SymmetricPolynomial:
    """Monic P_lambda = m_lambda + sum_{mu < lambda} u_mu m_mu."""
    kappa = _check_kappa(kappa)
    if isinstance(partition, Partition):
        if N is not None and partition.n_vars != N:
            partition = Partition.from_parts(partition.parts, N)
    else:
        if N is None:
            raise InvalidLabelError("number of variables N is required for a bare part list")
        partition = Partition.from_parts(partition, N)
    return SymmetricPolynomial(partition.n_vars, _jack_terms(partition.parts, kappa))


@lru_cache(maxsize=None)
def _elementary_product(r: int, mu: PartitionKey) -> Mapping[PartitionKey, int]:
    """e_r * m_mu in the monomial basis."""
    n = len(mu)
    targets = {tuple(sorted((mu[i] + (i in subset) for i in range(n)), reverse=True))
               for subset in combinations(range(n), r)}
    product = {}
    for nu in targets:
        count = 0
        for subset in combinations(range(n), r):
            lowered = [nu[i] - (i in subset) for i in range(n)]
            if min(lowered) >= 0 and tuple(sorted(lowered, reverse=True)) == mu:
                count += 1
        product[nu] = count
    return MappingProxyType(product)


def _expand_in_jack_basis(terms: Mapping[PartitionKey, Fraction], kappa: Fraction) -> Dict[PartitionKey, Fraction]:
    remainder = {key: Fraction(c) for key, c in terms.items() if c}
    expansion = {}
    while remainder:
        top = max(remainder)
        coeff = remainder[top]
        expansion[top] = coeff
        for key, u in _jack_terms(top, kappa).items():
            value = remainder.get(key, 0) - coeff * u
            if value:
                remainder[key] = value
            else:
                remainder.pop(key, None)
    return expansion


def _pieri_targets(key: PartitionKey, r: int) -> set:
    n = len(key)
    targets = set()
    for subset in combinations(range(n), r):
        raised = tuple(key[i] + (i in subset) for i in range(n))
        if all(raised[i] >= raised[i + 1] for i in range(n - 1)):
            targets.add(_canonical_key(raised))
    return targets


@lru_cache(maxsize=None)
def _pieri_expansion(key: PartitionKey, r: int, kappa: Fraction) -> Mapping[PartitionKey, Fraction]:
    product = defaultdict(Fraction)
    for mu, u in _jack_terms(key, kappa).items():
        for nu, count in _elementary_product(r, mu).items():
            product[nu] += u * count
    expansion = {_canonical_key(nu): c for nu, c in _expand_in_jack_basis(product, kappa).items()}

    stray = set(expansion) - _pieri_targets(key, r)
    if stray:
        raise InternalError(f"e_{r} * P{key} at kappa={kappa} left a nonzero residual on {sorted(stray)}")
    return MappingProxyType(expansion)


def _pieri(P: SymmetricPolynomial, r: int, kappa) -> Dict[Partition, Fraction]:
    kappa = _check_kappa(kappa)
    key = P.leading
    if key is None:
        raise InvalidLabelError("cannot expand the zero polynomial")
    if dict(P.terms) != dict(_jack_terms(key, kappa)):
        raise InvalidLabelError(f"polynomial with leading term {key} is not the Jack polynomial at kappa={kappa}")
    return {Partition(nu): c for nu, c in _pieri_expansion(key, r, kappa).items()}


def multiply_e1(P: SymmetricPolynomial, kappa) -> Dict[Partition, Fraction]:
    """z_1 P_lambda expanded in Jack polynomials, labels canonicalized."""
    return _pieri(P, 1, kappa)


def multiply_e_last(P: SymmetricPolynomial, kappa) -> Dict[Partition, Fraction]:
    """z_{N-1} P_lambda expanded in Jack polynomials, full columns removed (z_N = 1)."""
    return _pieri(P, P.n_vars - 1, kappa)


def mu_vector(j: int, n: int) -> Tuple[int, ...]:
    """The n-tuple with i-th entry delta_{i,j} - delta_{i,j-1}."""
    if not 1 <= j <= n + 1:
        raise InvalidLabelError(f"mu_j needs 1 <= j <= {n + 1}, got {j}")
    return tuple((i == j) - (i == j - 1) for i in range(1, n + 1))


def _label(m, n: int) -> QuantumNumbers:
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    if label.rank != n:
        raise InvalidLabelError(f"quantum numbers {label.m} do not match rank {n}")
    return label


@lru_cache(maxsize=None)
def _recurrence_table(m: Tuple[int, ...], kappa: Fraction, n: int) -> RecurrenceTable:
    label = QuantumNumbers(m)
    N = n + 1
    key = quantum_to_partition(label, N).parts
    up_expansion = _pieri_expansion(key, 1, kappa)
    down_expansion = _pieri_expansion(key, N - 1, kappa)

    up, down = [], []
    for j in range(1, N + 1):
        mu = mu_vector(j, n)
        raised = label.shifted(mu)
        lowered = label.shifted(tuple(-x for x in mu))
        up.append((j, up_expansion.get(quantum_to_partition(raised, N).parts, Fraction(0)) if raised else Fraction(0)))
        down.append((j, down_expansion.get(quantum_to_partition(lowered, N).parts, Fraction(0)) if lowered else Fraction(0)))
    return RecurrenceTable(m=label, up=tuple(up), down=tuple(down))


def recurrence_table(m, kappa, n: int) -> RecurrenceTable:
    """All c_{j,m} and c~_{j,m}; coefficients of invalid targets are 0."""
    label = _label(m, n)
    return _recurrence_table(label.m, _check_kappa(kappa), n)


def a_coefficient(m, kappa, n: int) -> Fraction:
    """a_m = sum_j c~_{j,m} c_{j,m-mu_j}, the diagonal part of z_1 z_n."""
    label = _label(m, n)
    kappa = _check_kappa(kappa)
    table = _recurrence_table(label.m, kappa, n)
    total = Fraction(0)
    for j in range(1, n + 2):
        lowered = label.shifted(tuple(-x for x in mu_vector(j, n)))
        if lowered is None:
            continue
        c_tilde = table.c_tilde(j)
        if c_tilde:
            total += c_tilde * _recurrence_table(lowered.m, kappa, n).c(j)
    return total


def elementary_from_coordinates(q) -> np.ndarray:
    """z_1..z_N of x_j = exp(2 i q_j), read off prod_j (u + x_j)."""
    x = np.exp(2j * np.asarray(q, dtype=float))
    return np.poly(-x)[1:]
