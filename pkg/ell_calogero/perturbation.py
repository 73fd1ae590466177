"""Perturbative corrections in the nome g to the elliptic spectrum.

All corrections are exact rationals stored as coefficients of g^p; only
EnergyExpansion.evaluate() touches floating point.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from algebra import QuantumNumbers, as_coupling, trig_energy, trig_energy_gap, EnergyConvention
from jack import RecurrenceTable, a_coefficient
from exceptions import InvalidLabelError, PoleError


_LOGGER = logging.getLogger('ell_calogero')

GENERIC_RECURRENCE = 'generic-recurrence'
A1_CLOSED = 'a1-closed'
A2_CLOSED = 'a2-closed'
A3_CLOSED = 'a3-closed'
A3_AXIS = 'a3-axis'
A1_RECURRENCE = 'a1-recurrence'
A1_CLOSED_AS_PRINTED = 'a1-closed-as-printed'
A1_SUM_OVER_STATES = 'a1-sum-over-states'


@dataclass(frozen=True)
class EnergyExpansion:
    """E(g) = e_trig + const_shift + d1 g + d2 g^2."""
    m: QuantumNumbers
    kappa: Fraction
    e_trig: Fraction
    const_shift: Fraction
    d1: Fraction
    d2: Optional[Fraction] = None
    order: int = 1
    provenance: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (1, 2):
            raise InvalidLabelError(f"expansion order must be 1 or 2, got {self.order}")
        if (self.d2 is not None) != (self.order == 2 and self.m.rank == 1):
            raise InvalidLabelError("d2 is present exactly for rank 1 at order 2")

    def evaluate(self, g: float) -> float:
        value = float(self.e_trig + self.const_shift) + float(self.d1) * g
        if self.d2 is not None:
            value += float(self.d2) * g * g
        return value


def evaluate(expansion: EnergyExpansion, g: float) -> float:
    return expansion.evaluate(g)


def _free(kappa: Fraction) -> bool:
    return kappa * (kappa - 1) == 0


def _quotient(numerator: Fraction, *factors: Tuple[str, Fraction]) -> Fraction:
    """numerator / prod(factors); a vanishing factor raises PoleError naming it."""
    denominator = Fraction(1)
    for name, value in factors:
        if value == 0:
            raise PoleError(f"denominator factor {name} vanishes", factor=name)
        denominator *= value
    return numerator / denominator


def _label(m, n: int) -> QuantumNumbers:
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    if label.rank != n:
        raise InvalidLabelError(f"quantum numbers {label.m} do not match rank {n}")
    return label


def const_shift(N: int, kappa) -> Fraction:
    """-(1/6) kappa (kappa - 1) N (N - 1)."""
    if isinstance(N, bool) or int(N) != N or N < 2:
        raise InvalidLabelError(f"need at least two particles, got N={N!r}")
    kappa = as_coupling(kappa)
    return -kappa * (kappa - 1) * N * (N - 1) / 6


# Closed coefficient tables. The leading integer factor of each formula is zero
# exactly when its target label is invalid, and then the value is 0.

def c_a1(m: int, kappa) -> Fraction:
    """c_m = m (m - 1 + 2 kappa) / ((m + kappa)(m - 1 + kappa))."""
    kappa = as_coupling(kappa)
    if m <= 0:
        return Fraction(0)
    return _quotient(m * (m - 1 + 2 * kappa),
                     ('(m+kappa)', m + kappa), ('(m-1+kappa)', m - 1 + kappa))


def a_a2(m: int, n: int, kappa) -> Fraction:
    kappa = as_coupling(kappa)
    if n <= 0:
        return Fraction(0)
    return _quotient(n * (m + n + kappa) * (n - 1 + 2 * kappa) * (m + n - 1 + 3 * kappa),
                     ('(n+kappa)', n + kappa), ('(n-1+kappa)', n - 1 + kappa),
                     ('(m+n+2kappa)', m + n + 2 * kappa), ('(m+n-1+2kappa)', m + n - 1 + 2 * kappa))


def d_a3(m: int, l: int, n: int, kappa) -> Fraction:
    kappa = as_coupling(kappa)
    if n <= 0:
        return Fraction(0)
    return _quotient(n * (l + n + kappa) * (n - 1 + 2 * kappa) * (m + l + n + 2 * kappa)
                     * (l + n - 1 + 3 * kappa) * (m + l + n - 1 + 4 * kappa),
                     ('(n+kappa)', n + kappa), ('(n-1+kappa)', n - 1 + kappa),
                     ('(l+n+2kappa)', l + n + 2 * kappa), ('(l+n-1+2kappa)', l + n - 1 + 2 * kappa),
                     ('(m+l+n+3kappa)', m + l + n + 3 * kappa), ('(m+l+n-1+3kappa)', m + l + n - 1 + 3 * kappa))


def closed_recurrence_table(m, kappa) -> RecurrenceTable:
    """c_{j,m}, c~_{j,m} from the closed formulas, ranks 1 to 3."""
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    kappa = as_coupling(kappa)
    one = Fraction(1)

    if label.rank == 1:
        (a,) = label.m
        up = (one, c_a1(a, kappa))
        down = (c_a1(a, kappa), one)
    elif label.rank == 2:
        a, b = label.m
        up = (one, c_a1(a, kappa), a_a2(a, b, kappa))
        down = (a_a2(b, a, kappa), c_a1(b, kappa), one)
    elif label.rank == 3:
        a, l, b = label.m
        up = (one, c_a1(a, kappa), a_a2(a, l, kappa), d_a3(a, l, b, kappa))
        down = (d_a3(b, l, a, kappa), a_a2(b, l, kappa), c_a1(b, kappa), one)
    else:
        raise InvalidLabelError(f"closed coefficient tables exist for ranks 1 to 3, got rank {label.rank}")

    return RecurrenceTable(m=label,
                           up=tuple(enumerate(up, start=1)),
                           down=tuple(enumerate(down, start=1)))


def delta1_generic(m, kappa, n: int) -> Fraction:
    """4 kappa (kappa - 1)(N^2 - a_m)."""
    label = _label(m, n)
    kappa = as_coupling(kappa)
    if _free(kappa):
        return Fraction(0)
    N = n + 1
    return 4 * kappa * (kappa - 1) * (N * N - a_coefficient(label, kappa, n))


def delta1_a1_closed(m: int, kappa) -> Fraction:
    kappa = as_coupling(kappa)
    QuantumNumbers((m,))
    if _free(kappa):
        return Fraction(0)
    k1 = kappa * (kappa - 1)
    return 8 * k1 * (1 + _quotient(k1, ('(m+1+kappa)', m + 1 + kappa), ('(m-1+kappa)', m - 1 + kappa)))


def delta1_a2_closed(m: int, n: int, kappa) -> Fraction:
    kappa = as_coupling(kappa)
    QuantumNumbers((m, n))
    if _free(kappa):
        return Fraction(0)
    k1 = kappa * (kappa - 1)
    first = 3 * kappa ** 2 + 3 * (m + n) * kappa + m * m + n * n + m * n - 3
    second = 2 * kappa ** 2 + (3 * m + 3 * n + 1) * kappa + m * m + n * n + m * n - 1
    correction = _quotient(8 * k1 * k1 * first * second,
                           ('(m+1+kappa)', m + 1 + kappa), ('(m-1+kappa)', m - 1 + kappa),
                           ('(n+1+kappa)', n + 1 + kappa), ('(n-1+kappa)', n - 1 + kappa),
                           ('(m+n+1+2kappa)', m + n + 1 + 2 * kappa), ('(m+n-1+2kappa)', m + n - 1 + 2 * kappa))
    return 24 * k1 + correction


def _a3_terms(m: int, l: int, n: int, kappa: Fraction) -> Tuple[Fraction, ...]:
    k = kappa
    t1 = Fraction(0) if n == 0 else _quotient(
        n * (l + 1) * (l + m + 1 + k) * (l + 2 * k) * (n - 1 + 2 * k) * (l + m + 3 * k),
        ('(l+kappa)', l + k), ('(l+1+kappa)', l + 1 + k), ('(n+kappa)', n + k), ('(n-1+kappa)', n - 1 + k),
        ('(l+m+2kappa)', l + m + 2 * k), ('(l+m+1+2kappa)', l + m + 1 + 2 * k))
    t2 = _quotient(
        (n + 1) * (l + n + 1 + k) * (n + 2 * k) * (l + m + n + 1 + 2 * k) * (l + n + 3 * k) * (l + m + n + 4 * k),
        ('(n+kappa)', n + k), ('(n+1+kappa)', n + 1 + k), ('(l+n+2kappa)', l + n + 2 * k),
        ('(l+n+1+2kappa)', l + n + 1 + 2 * k), ('(l+m+n+3kappa)', l + m + n + 3 * k),
        ('(l+m+n+1+3kappa)', l + m + n + 1 + 3 * k))
    t3 = Fraction(0) if m == 0 else _quotient(
        m * (l + m + k) * (m - 1 + 2 * k) * (l + m + n + 2 * k) * (l + m - 1 + 3 * k) * (l + m + n - 1 + 4 * k),
        ('(m+kappa)', m + k), ('(m-1+kappa)', m - 1 + k), ('(l+m+2kappa)', l + m + 2 * k),
        ('(l+m-1+2kappa)', l + m - 1 + 2 * k), ('(l+m+n+3kappa)', l + m + n + 3 * k),
        ('(l+m+n-1+3kappa)', l + m + n - 1 + 3 * k))
    t4 = Fraction(0) if l == 0 else _quotient(
        l * (m + 1) * (l + n + k) * (m + 2 * k) * (l - 1 + 2 * k) * (l + n - 1 + 3 * k),
        ('(l+kappa)', l + k), ('(l-1+kappa)', l - 1 + k), ('(m+kappa)', m + k), ('(m+1+kappa)', m + 1 + k),
        ('(l+n+2kappa)', l + n + 2 * k), ('(l+n-1+2kappa)', l + n - 1 + 2 * k))
    return t1, t2, t3, t4


def delta1_a3_closed(m: int, l: int, n: int, kappa) -> Fraction:
    kappa = as_coupling(kappa)
    QuantumNumbers((m, l, n))
    if _free(kappa):
        return Fraction(0)
    return 4 * kappa * (kappa - 1) * (16 - sum(_a3_terms(m, l, n, kappa)))


def delta1_a3_special(axis: str, value: int, kappa) -> Fraction:
    """Rank-3 delta1 on the label axes (m,0,0), (0,l,0) and (0,0,n)."""
    kappa = as_coupling(kappa)
    if axis not in ('m', 'l', 'n'):
        raise InvalidLabelError(f"axis must be one of 'm', 'l', 'n', got {axis!r}")
    QuantumNumbers((value,))
    if _free(kappa):
        return Fraction(0)
    k = kappa
    k1 = k * (k - 1)
    v = value
    if axis == 'l':
        return 16 * k1 * (3 + _quotient(3 * k ** 3 + 4 * v * k ** 2 + (v * v - 3) * k,
                                        ('(1+kappa)', 1 + k), ('(l-1+kappa)', v - 1 + k),
                                        ('(l+1+3kappa)', v + 1 + 3 * k)))
    name = axis
    return 24 * k1 * (2 + _quotient(4 * k ** 3 + (4 * v - 2) * k ** 2 + (v * v - 2) * k,
                                    (f'({name}-1+kappa)', v - 1 + k), ('(1+2kappa)', 1 + 2 * k),
                                    (f'({name}+1+3kappa)', v + 1 + 3 * k)))


def delta1_closed(m, kappa) -> Tuple[Fraction, str]:
    """Closed-form delta1 for ranks 1 to 3 with the route that produced it."""
    label = m if isinstance(m, QuantumNumbers) else QuantumNumbers(tuple(m))
    if label.rank == 1:
        return delta1_a1_closed(label.m[0], kappa), A1_CLOSED
    if label.rank == 2:
        return delta1_a2_closed(*label.m, kappa), A2_CLOSED
    if label.rank == 3:
        return delta1_a3_closed(*label.m, kappa), A3_CLOSED
    raise InvalidLabelError(f"no closed delta1 form for rank {label.rank}")


def _c(m: int, kappa: Fraction) -> Fraction:
    return c_a1(m, kappa) if m >= 1 else Fraction(0)


def delta2_a1_bracket(m: int, kappa) -> Fraction:
    """Diagonal expectation of 4 + 7 z^2 - 2 z^4 in the state m."""
    kappa = as_coupling(kappa)
    c0, c1, c2, cm1 = _c(m, kappa), _c(m + 1, kappa), _c(m + 2, kappa), _c(m - 1, kappa)
    s = c0 + c1
    return 4 + 7 * s - 2 * s * s - 2 * c2 * c1 - 2 * c0 * cm1


def delta2_a1_recurrence(m: int, kappa) -> Fraction:
    """Coefficient of g^2 built from the rank-1 recurrence coefficients."""
    kappa = as_coupling(kappa)
    QuantumNumbers((m,))
    if _free(kappa):
        return Fraction(0)
    k1 = kappa * (kappa - 1)
    first = 4 * k1 * delta2_a1_bracket(m, kappa)

    coupled = Fraction(0)
    up = _c(m + 2, kappa) * _c(m + 1, kappa)
    if up:
        coupled += up / trig_energy_gap((m,), (m + 2,), kappa, 1)
    down = _c(m, kappa) * _c(m - 1, kappa)
    if down:
        coupled += down / trig_energy_gap((m,), (m - 2,), kappa, 1)
    return first + 16 * k1 * k1 * coupled


def delta2_a1_closed(m: int, kappa) -> Fraction:
    """The printed closed form of the rank-1 g^2 coefficient, evaluated verbatim.

    It does not agree with delta2_a1_recurrence; see the verify adjudication suite.
    """
    kappa = as_coupling(kappa)
    QuantumNumbers((m,))
    if _free(kappa):
        return Fraction(0)
    _LOGGER.warning(f"evaluating the as-printed closed g^2 form at m={m}, kappa={kappa}")
    k2 = (kappa * (kappa - 1)) ** 2
    s = m + kappa
    first = 8 * k2 * (3 - _quotient(kappa ** 2 - (10 * m + 6) * kappa - 5 * m * m + 8,
                                    ('[(m+kappa)^2-4]', s * s - 4), ('[(m+kappa)^2-1]', s * s - 1)))
    lower = _quotient(m * (m - 1) * (m - 1 + 2 * kappa) * (m - 2 + 2 * kappa),
                      ('(m-1+kappa)^3', (m - 1 + kappa) ** 3), ('(m-2+kappa)', m - 2 + kappa))
    upper = _quotient((m + 1) * (m + 2) * (m + 2 * kappa) * (m + 1 + 2 * kappa),
                      ('(m+1+kappa)^3', (m + 1 + kappa) ** 3), ('(m+2+kappa)', m + 2 + kappa))
    second = _quotient(4 * k2 * (lower - upper), ('(m+kappa)', s))
    return first + second


def energy_expansion(m, kappa, n: int, order: int = 1, d2_form: str = 'recurrence') -> EnergyExpansion:
    """Assemble E_trig + const_shift + d1 g (+ d2 g^2 for rank 1)."""
    label = _label(m, n)
    kappa = as_coupling(kappa)
    if order == 2 and n != 1:
        raise InvalidLabelError(f"second order is available for rank 1 only, got rank {n}")

    provenance = {'d1': GENERIC_RECURRENCE}
    d2 = None
    if order == 2:
        if d2_form == 'recurrence':
            d2 = delta2_a1_recurrence(label.m[0], kappa)
            provenance['d2'] = A1_RECURRENCE
        elif d2_form == 'closed':
            d2 = delta2_a1_closed(label.m[0], kappa)
            provenance['d2'] = A1_CLOSED_AS_PRINTED
        else:
            raise InvalidLabelError(f"unknown g^2 form {d2_form!r}")

    expansion = EnergyExpansion(
        m=label,
        kappa=kappa,
        e_trig=trig_energy(label, kappa, n, EnergyConvention.WEYL).value,
        const_shift=const_shift(n + 1, kappa),
        d1=delta1_generic(label, kappa, n),
        d2=d2,
        order=order,
        provenance=provenance,
    )
    _LOGGER.debug(f"energy expansion m={label} kappa={kappa}: {expansion}")
    return expansion
