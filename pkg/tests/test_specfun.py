import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from regfm import specfun
from regfm.specfun import bessel_j, bessel_y, farfield_gamma, fundamental_solution, hankel1

# frozen from tests/series_oracle.py (30-term ascending series)
J0_1 = 0.7651976865579666
Y0_1 = 0.0882569642156770
J0_2 = 0.2238907791412356
J1_2 = 0.5767248077568736
Y0_2 = 0.5103756726497453


def test_series_fixtures():
    assert bessel_j(0, 1.0) == pytest.approx(J0_1, abs=1e-10)
    assert bessel_y(0, 1.0) == pytest.approx(Y0_1, abs=1e-10)
    assert bessel_j(0, 2.0) == pytest.approx(J0_2, abs=1e-10)
    assert bessel_j(1, 2.0) == pytest.approx(J1_2, abs=1e-10)
    assert bessel_y(0, 2.0) == pytest.approx(Y0_2, abs=1e-10)


def test_small_argument_limits():
    assert bessel_j(0, 1e-12) == pytest.approx(1.0, abs=1e-12)
    assert bessel_j(1, 1e-12) == pytest.approx(0.0, abs=1e-12)
    assert bessel_y(0, 1e-10) < -10


def test_wronskian_at_two():
    x = 2.0
    lhs = bessel_j(1, x) * bessel_y(0, x) - bessel_j(0, x) * bessel_y(1, x)
    assert lhs == pytest.approx(2 / (math.pi * x), abs=1e-10)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        bessel_j(0, bad)
    with pytest.raises(ValueError):
        bessel_y(1, bad)
    with pytest.raises(ValueError):
        hankel1(0, bad)


def test_order_limit():
    with pytest.raises(ValueError):
        bessel_j(61, 1.0)
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)


def test_against_scipy():
    x = np.linspace(0.1, 100.0, 3001)
    for n in (0, 1, 2, 7, 15, 20, 40, 60):
        assert np.max(np.abs(bessel_j(n, x) - special.jv(n, x))) < 1e-10
    for n in (0, 1, 2, 7, 15):
        ref = special.yv(n, x)
        assert np.max(np.abs(bessel_y(n, x) - ref) / np.maximum(1.0, np.abs(ref))) < 1e-9


def test_hankel_values():
    assert hankel1(0, 1.0) == pytest.approx(complex(J0_1, Y0_1), abs=1e-10)
    for x in (0.3, 2.0, 17.0):
        assert hankel1(-1, x) == pytest.approx(-hankel1(1, x), abs=1e-14)
        assert hankel1(-4, x) == pytest.approx(hankel1(4, x), abs=1e-12)


def test_hankel_asymptotic_at_50():
    x = 50.0
    approx = math.sqrt(2 / (math.pi * x)) * np.exp(1j * (x - math.pi / 4))
    assert abs(hankel1(0, x) - approx) / abs(approx) < 0.01


def test_hankel_asymptotic_rate():
    xs = np.geomspace(20, 200, 12)
    resid = []
    for n in (0, 3):
        approx = np.sqrt(2 / (np.pi * xs)) * np.exp(1j * (xs - n * np.pi / 2 - np.pi / 4))
        resid = np.abs(hankel1(n, xs) - approx)
        slope = np.polyfit(np.log(xs), np.log(resid), 1)[0]
        assert -1.7 <= slope <= -1.3


def test_fundamental_solution():
    val = fundamental_solution((1.0, 0.0), (0.0, 0.0), 1.0)
    assert val == pytest.approx(0.25j * complex(J0_1, Y0_1), abs=1e-10)
    x, y = np.array([0.3, -1.2]), np.array([2.0, 0.7])
    assert fundamental_solution(x, y, 3.0) == fundamental_solution(y, x, 3.0)
    with pytest.raises(ValueError):
        fundamental_solution(x, x, 1.0)


def test_fundamental_solution_far_field():
    k = 4.0
    gamma = farfield_gamma(k)
    for angle in np.linspace(0, 2 * np.pi, 7):
        xhat = np.array([np.cos(angle), np.sin(angle)])
        x = 100.0 * xhat
        # the neglected term is ~ k |y|^2 / (2 |x|): 1% needs |y| <= 0.7 at |x| = 100
        y = np.array([0.5, -0.45])
        approx = gamma * np.exp(1j * k * 100.0) / 10.0 * np.exp(-1j * k * xhat @ y)
        exact = fundamental_solution(x, y, k)
        assert abs(exact - approx) / abs(exact) < 0.01


def test_fundamental_solution_far_field_decay():
    k, y = 4.0, np.array([0.0, 1.0])
    xhat = np.array([1.0, 0.0])
    errs = []
    for r in (100.0, 1000.0):
        approx = farfield_gamma(k) * np.exp(1j * k * r) / math.sqrt(r) * np.exp(-1j * k * xhat @ y)
        exact = fundamental_solution(r * xhat, y, k)
        errs.append(abs(exact - approx) / abs(exact))
    assert errs[0] < 0.025
    assert errs[1] == pytest.approx(errs[0] / 10, rel=0.05)


def test_farfield_gamma():
    assert farfield_gamma(1 / (8 * math.pi)) == pytest.approx(np.exp(0.25j * math.pi), abs=1e-15)
    assert abs(farfield_gamma(2.5)) == pytest.approx(1 / math.sqrt(8 * math.pi * 2.5))
    expected = (1 / math.sqrt(32 * math.pi)) * (math.sqrt(2) / 2) * (1 + 1j)
    assert farfield_gamma(4.0) == pytest.approx(expected, abs=1e-15)
    with pytest.raises(ValueError):
        farfield_gamma(0.0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 20), x=st.floats(0.5, 50.0))
def test_wronskian_property(n, x):
    lhs = bessel_j(n + 1, x) * bessel_y(n, x) - bessel_j(n, x) * bessel_y(n + 1, x)
    assert abs(lhs - 2 / (math.pi * x)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 20), x=st.floats(0.5, 50.0))
def test_recurrence_property(n, x):
    for f in (bessel_j, bessel_y):
        lhs = f(n - 1, x) + f(n + 1, x)
        rhs = 2 * n / x * f(n, x)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs), abs(f(n - 1, x)), abs(f(n + 1, x)))


def test_vectorised_matches_scalar():
    x = np.array([0.2, 3.3, 12.0, 12.5, 88.0])
    table = specfun.hankel1_table(5, x)
    for n in range(6):
        for i, xi in enumerate(x):
            assert table[n, i] == pytest.approx(hankel1(n, xi), rel=1e-14)
