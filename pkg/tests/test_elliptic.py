import math

import numpy as np
import pytest

from elliptic import (WeierstrassParams, divisors, tail_bound, v_p, weier_p_lambert, weier_p_lattice, weier_p_series)
from exceptions import ConvergenceError, InvalidLabelError, SeriesTruncationError

TOL = 1e-12
LATTICE_TOL = 1e-8


def test_divisors():
    assert divisors(12).divisors == (1, 2, 3, 4, 6, 12)
    assert divisors(12).sigma == 28
    assert divisors(1).sigma == 1
    assert divisors(7).sigma == 8
    for p in (0, -3, 2.5):
        with pytest.raises(InvalidLabelError):
            divisors(p)


def test_v_p_values():
    assert v_p(1, math.pi / 4) == pytest.approx(8.0, abs=TOL)
    assert v_p(2, math.pi / 4) == pytest.approx(40.0, abs=TOL)
    assert v_p(3, math.pi / 2) == pytest.approx(64.0, abs=TOL)
    np.testing.assert_allclose(v_p(2, np.array([0.0, math.pi])), [0.0, 0.0], atol=TOL)


def test_params():
    params = WeierstrassParams(g=math.exp(-4.0))
    assert params.omega2_abs == pytest.approx(1.0, rel=TOL)
    assert params.omega2 == pytest.approx(1.0j, rel=TOL)
    assert WeierstrassParams(g=0.0).omega2_abs == math.inf
    for g in (-0.1, 1.0, 1.5):
        with pytest.raises(SeriesTruncationError):
            WeierstrassParams(g=g)
    with pytest.raises(SeriesTruncationError):
        WeierstrassParams(g=0.1, p_max=0)


@pytest.mark.parametrize('z', [0.3, 0.7, 1.2, 2.5])
def test_trigonometric_limit(z):
    series = weier_p_series(z, WeierstrassParams(g=0.0, p_max=10))
    assert series.value == pytest.approx(1.0 / math.sin(z) ** 2 - 1.0 / 3.0, rel=TOL)
    assert series.tail_bound == 0.0


@pytest.mark.parametrize('g', [0.01, 0.1, 0.3])
def test_period_and_parity(g):
    params = WeierstrassParams(g=g, p_max=60)
    for z in (0.4, 0.9, 1.3):
        value = weier_p_series(z, params).value
        assert weier_p_series(z + math.pi, params).value == pytest.approx(value, rel=1e-10)
        assert weier_p_series(-z, params).value == pytest.approx(value, rel=TOL)


def test_double_pole():
    params = WeierstrassParams(g=0.05, p_max=60)
    z = 1e-3
    assert abs(weier_p_series(z, params).value - 1.0 / z ** 2) < 1e-3


@pytest.mark.parametrize('g', [0.01, 0.05, 0.1, 0.3])
def test_tail_bound_is_sound(g):
    p_max = 10
    rest = sum(g ** p * v_p(p, 0.9) for p in range(p_max + 1, 200))
    assert 0.0 <= rest <= tail_bound(g, p_max)
    assert tail_bound(g, 2 * p_max) < tail_bound(g, p_max)


def test_tail_bound_limit():
    with pytest.raises(SeriesTruncationError):
        weier_p_series(0.7, WeierstrassParams(g=0.99, p_max=10))
    value = weier_p_series(0.7, WeierstrassParams(g=0.99, p_max=10), max_tail_bound=math.inf)
    assert value.tail_bound > 1.0


@pytest.mark.parametrize('z', [0.0, math.pi])
def test_series_pole(z):
    with pytest.raises(SeriesTruncationError):
        weier_p_series(z, WeierstrassParams(g=0.05))


@pytest.mark.parametrize('g', [0.01, 0.05, 0.1])
@pytest.mark.parametrize('z', [0.3, 0.7, 1.2])
def test_lambert_agrees(z, g):
    series = weier_p_series(z, WeierstrassParams(g=g, p_max=60)).value
    assert weier_p_lambert(z, g, 60) == pytest.approx(series, abs=TOL * max(1.0, abs(series)))


@pytest.mark.parametrize('z,g', [(0.7, 0.05), (1.2, 0.1)])
def test_lattice_oracle(z, g):
    params = WeierstrassParams(g=g, p_max=60)
    series = weier_p_series(z, params).value
    lattice = weier_p_lattice(z, params.omega2_abs)
    assert abs(series - lattice.value) < LATTICE_TOL
    assert lattice.change <= 1e-11 * max(1.0, abs(lattice.value))


def test_lattice_errors():
    for omega2_abs in (math.inf, math.nan, 0.0):
        with pytest.raises(SeriesTruncationError):
            weier_p_lattice(0.7, omega2_abs)
    with pytest.raises(SeriesTruncationError):
        weier_p_lattice(math.pi, 1.0)
    with pytest.raises(ConvergenceError):
        weier_p_lattice(0.7, 1.0, cutoff=8)


@pytest.mark.parametrize('p', [1, 2, 4, 6, 12])
def test_v_p_parity_and_period(p):
    z = np.linspace(-3.0, 3.0, 41)
    values = v_p(p, z)
    np.testing.assert_allclose(v_p(p, -z), values, rtol=TOL, atol=TOL)
    np.testing.assert_allclose(v_p(p, z + math.pi), values, rtol=1e-10, atol=1e-10)
    assert np.all(values >= 0.0)


@pytest.mark.parametrize('z,g', [(0.7, 0.05), (1.2, 0.1)])
def test_lattice_is_even(z, g):
    omega2_abs = WeierstrassParams(g=g).omega2_abs
    assert weier_p_lattice(-z, omega2_abs).value == pytest.approx(weier_p_lattice(z, omega2_abs).value, rel=1e-10)


@pytest.mark.parametrize('g', [0.0, 0.05, 0.3])
@pytest.mark.parametrize('z', [1e-3, 1e-4, -1e-4])
def test_leading_double_pole_coefficient(z, g):
    value = weier_p_series(z, WeierstrassParams(g=g, p_max=60)).value
    assert abs(z * z * value - 1.0) < 1e-5
