"""Weierstrass P on the real axis for the lattice with semiperiods pi/2 and i|omega2|.

Three independent evaluations are provided: the nome series regrouped by divisors,
the Lambert-series form, and a brute-force lattice sum used as an oracle.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import barycentric_interpolate
from sympy import divisors as _sympy_divisors

from exceptions import InvalidLabelError, SeriesTruncationError, ConvergenceError


_LOGGER = logging.getLogger('ell_calogero')

OMEGA1 = math.pi / 2

_DEFAULT_P_MAX = 60
_DEFAULT_MAX_TAIL_BOUND = 1.0

_LATTICE_START_CUTOFF = 64
_LATTICE_MAX_CUTOFF = 1024
_LATTICE_MIN_CUTOFF = 16
_LATTICE_TOLERANCE = 1e-11


@dataclass(frozen=True)
class WeierstrassParams:
    """Nome g = exp(-4|omega2|) and the series truncation."""
    g: float
    p_max: int = _DEFAULT_P_MAX
    omega1: float = OMEGA1

    def __post_init__(self):
        if not 0.0 <= self.g < 1.0:
            raise SeriesTruncationError(f"the nome must satisfy 0 <= g < 1, got {self.g}")
        if int(self.p_max) != self.p_max or self.p_max < 1:
            raise SeriesTruncationError(f"p_max must be a positive integer, got {self.p_max}")

    @property
    def omega2_abs(self) -> float:
        return math.inf if self.g == 0.0 else -math.log(self.g) / 4.0

    @property
    def omega2(self) -> complex:
        """ln(g)/(4i), purely imaginary."""
        return complex(0.0, self.omega2_abs)


@dataclass(frozen=True)
class DivisorSet:
    p: int
    divisors: Tuple[int, ...]

    @property
    def sigma(self) -> int:
        return sum(self.divisors)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float
    p_max: int


@dataclass(frozen=True)
class LatticeValue:
    value: float
    cutoff: int
    change: float


@lru_cache(maxsize=None)
def divisors(p: int) -> DivisorSet:
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise InvalidLabelError(f"divisors need a positive integer, got {p!r}")
    return DivisorSet(p=int(p), divisors=tuple(int(h) for h in _sympy_divisors(int(p))))


def v_p(p: int, z):
    """V_p(z) = 8 sum_{h | p} h (1 - cos 2hz)."""
    z = np.asarray(z, dtype=float)
    total = np.zeros_like(z)
    for h in divisors(p).divisors:
        total = total + h * (1.0 - np.cos(2.0 * h * z))
    return 8.0 * total if total.ndim else float(8.0 * total)


def tail_bound(g: float, p_max: int) -> float:
    """16 sum_{p > p_max} p^2 g^p in closed form (sigma_1(p) <= p^2)."""
    if g == 0.0:
        return 0.0
    q = p_max + 1
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        one_minus = np.float64(1.0) - g
        bound = 16.0 * g ** q * (q * q / one_minus + 2.0 * q * g / one_minus ** 2 + g * (1.0 + g) / one_minus ** 3)
    return float(bound)


def _check_not_pole(z: float) -> None:
    if abs(math.sin(z)) < 1e-14:
        raise SeriesTruncationError(f"z = {z} sits on a pole of P (integer multiple of pi)")


def weier_p_series(z: float, params: WeierstrassParams, max_tail_bound: float = _DEFAULT_MAX_TAIL_BOUND) -> SeriesValue:
    """sin^-2 z - 1/3 + sum_{p <= p_max} g^p V_p(z) with a rigorous bound on the rest."""
    _check_not_pole(z)
    bound = tail_bound(params.g, params.p_max)
    if not math.isfinite(bound) or bound > max_tail_bound:
        raise SeriesTruncationError(
            f"tail bound {bound} at g={params.g}, p_max={params.p_max} exceeds {max_tail_bound}, increase p_max")

    value = 1.0 / math.sin(z) ** 2 - 1.0 / 3.0
    if params.g > 0.0:
        for p in range(1, params.p_max + 1):
            value += params.g ** p * v_p(p, z)
    return SeriesValue(value=value, tail_bound=bound, p_max=params.p_max)


def weier_p_lambert(z: float, g: float, k_max: int) -> float:
    """sin^-2 z - 1/3 + 8 sum_k k g^k/(1 - g^k) (1 - cos 2kz)."""
    _check_not_pole(z)
    WeierstrassParams(g=g, p_max=max(1, k_max))
    k = np.arange(1, k_max + 1, dtype=float)
    gk = g ** k
    return float(1.0 / math.sin(z) ** 2 - 1.0 / 3.0 + 8.0 * np.sum(k * gk / (1.0 - gk) * (1.0 - np.cos(2.0 * k * z))))


def _shell_partial_sums(z: float, omega1: float, omega2_abs: float, cutoff: int) -> np.ndarray:
    """S(k) = 1/z^2 + sum over lattice points with max(|a|, |b|) <= k, k = 0..cutoff."""
    a = np.arange(-cutoff, cutoff + 1)
    A, B = np.meshgrid(a, a, indexing='ij')
    shell = np.maximum(np.abs(A), np.abs(B)).ravel()
    w = (2.0 * omega1 * A + 2.0j * omega2_abs * B).ravel()

    origin = shell == 0
    terms = np.zeros(w.shape, dtype=complex)
    nonzero = ~origin
    terms[nonzero] = 1.0 / (z - w[nonzero]) ** 2 - 1.0 / w[nonzero] ** 2

    per_shell = np.bincount(shell, weights=terms.real, minlength=cutoff + 1)
    per_shell[0] = 1.0 / z ** 2
    return np.cumsum(per_shell)


def _extrapolate(partial: np.ndarray, cutoff: int) -> float:
    """Neville extrapolation to u -> 0 in u^2, u = 1/(k + 1/2), over k = cutoff/8 .. cutoff."""
    ks = np.array([cutoff // 8, cutoff // 4, cutoff // 2, cutoff])
    u2 = 1.0 / (ks + 0.5) ** 2
    return float(barycentric_interpolate(u2, partial[ks], 0.0))


def weier_p_lattice(z: float, omega2_abs: float, cutoff: Optional[int] = None, omega1: float = OMEGA1,
                    tol: float = _LATTICE_TOLERANCE, max_cutoff: int = _LATTICE_MAX_CUTOFF) -> LatticeValue:
    """P(z) from the defining lattice sum over complete square shells.

    With a fixed cutoff the shell sums are extrapolated once and compared with the
    extrapolation at half the cutoff; without one the cutoff doubles until they agree.
    """
    if not (math.isfinite(omega2_abs) and omega2_abs > 0.0):
        raise SeriesTruncationError(f"lattice sum needs a finite |omega2| > 0, got {omega2_abs}")
    if abs(math.sin(math.pi * z / (2.0 * omega1))) < 1e-14:
        raise SeriesTruncationError(f"z = {z} is a lattice point")

    fixed = cutoff is not None
    cutoff = int(cutoff) if fixed else _LATTICE_START_CUTOFF
    if cutoff < _LATTICE_MIN_CUTOFF:
        raise ConvergenceError(f"lattice cutoff {cutoff} is below the minimum {_LATTICE_MIN_CUTOFF}")

    while True:
        partial = _shell_partial_sums(z, omega1, omega2_abs, cutoff)
        value = _extrapolate(partial, cutoff)
        change = abs(value - _extrapolate(partial, cutoff // 2))
        _LOGGER.debug(f"lattice P({z}) cutoff {cutoff}: {value:.17g} (change {change:.3g})")
        if change <= tol * max(1.0, abs(value)):
            return LatticeValue(value=value, cutoff=cutoff, change=change)
        if fixed or cutoff * 2 > max_cutoff:
            raise ConvergenceError(
                f"lattice sum for P({z}) not converged at cutoff {cutoff}: change {change:.3g} above tolerance {tol:.3g}")
        cutoff *= 2
