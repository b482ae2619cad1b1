import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from neumannkit.errors import DomainError
from neumannkit.specfun import (annulus_cross, annulus_radial_root, bessel, bessel_derivative_root,
                                bessel_root, jn, yn)


def series_j(m: int, x: float, terms: int = 80) -> float:
    """Power series of J_m, summed with mpmath at high precision."""
    with mpmath.workdps(60):
        x = mpmath.mpf(x)
        s = mpmath.mpf(0)
        for k in range(terms):
            s += (-1) ** k / (mpmath.factorial(k) * mpmath.factorial(k + m)) * (x / 2) ** (2 * k + m)
        return float(s)


@pytest.mark.parametrize("m", [0, 1, 2, 5])
@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 4.5, 12.0, 25.0])
def test_j_against_series(m, x):
    assert jn(m, x) == pytest.approx(series_j(m, x), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("m", [0, 1, 3])
@pytest.mark.parametrize("x", [0.05, 1.0, 7.0, 30.0, 58.0])
def test_y_against_mpmath(m, x):
    assert yn(m, x) == pytest.approx(float(mpmath.bessely(m, x)), rel=1e-10, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(0, 8), x=st.floats(0.1, 60.0))
def test_wronskian(m, x):
    # J_{m+1} Y_m - J_m Y_{m+1} = 2 / (pi x)
    w = jn(m + 1, x) * yn(m, x) - jn(m, x) * yn(m + 1, x)
    assert w == pytest.approx(2 / (math.pi * x), rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(1, 8), x=st.floats(0.5, 60.0))
def test_recurrence(m, x):
    for z in (jn, yn):
        lhs = z(m - 1, x) + z(m + 1, x)
        rhs = 2 * m / x * z(m, x)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_derivatives_satisfy_bessel_equation():
    for kind in ("J", "Y"):
        for m in (0, 1, 4):
            for x in (0.7, 3.0, 11.0):
                b = bessel(kind, m, x)
                res = x * x * b.d2 + x * b.d1 + (x * x - m * m) * b.value
                assert abs(res) < 1e-10 * max(1.0, x * x)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel("Y", 0, 0.0)
    with pytest.raises(DomainError):
        bessel("J", 0, -1.0)
    with pytest.raises(ValueError):
        bessel("K", 0, 1.0)


def test_roots():
    assert bessel_root(0, 1) == pytest.approx(2.404825557695773, abs=1e-14)
    assert bessel_root(1, 1) == pytest.approx(3.831705970207512, abs=1e-14)
    for m in range(4):
        for k in range(1, 5):
            z = bessel_root(m, k)
            assert abs(jn(m, z)) < 1e-14
            assert z == pytest.approx(float(mpmath.besseljzero(m, k)), abs=1e-12)
    assert bessel_derivative_root(1, 1) == pytest.approx(float(mpmath.besseljzero(1, 1, derivative=1)), abs=1e-12)


def test_annulus_roots():
    a = 0.5
    prev = 0.0
    for k in range(1, 5):
        kap = annulus_radial_root(a, k)
        assert abs(annulus_cross(kap, a)) < 1e-12
        assert kap > prev
        prev = kap
    # large roots approach k pi / (1 - a)
    assert annulus_radial_root(a, 4) == pytest.approx(4 * math.pi / (1 - a), rel=1e-2)
    with pytest.raises(DomainError):
        annulus_radial_root(1.5, 1)


def test_vectorized():
    x = np.linspace(0.1, 10, 7)
    assert np.allclose(jn(0, x), [series_j(0, v) for v in x], rtol=1e-10)
