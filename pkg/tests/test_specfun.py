from __future__ import annotations

import math

import mpmath
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from allocgame.errors import ArgumentError
from allocgame.specfun import (
    Tolerance,
    hyp2f1,
    log_factorial,
    log_multinomial,
    reg_inc_beta,
    reg_inc_gamma_upper,
)


class TestTolerance:
    def test_defaults(self):
        tol = Tolerance()
        assert 0 < tol.rel_eps < 1e-6 and tol.max_terms >= 1000

    @pytest.mark.parametrize("kwargs", [{"rel_eps": 0.0}, {"rel_eps": 1e-5}, {"max_terms": 10}])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ArgumentError):
            Tolerance(**kwargs)


@pytest.mark.parametrize("m", [0, 1, 5, 20, 170, 999, 1000, 1001, 5000])
def test_log_factorial_matches_lgamma(m):
    assert log_factorial(m) == pytest.approx(math.lgamma(m + 1), rel=1e-14, abs=1e-14)


def test_log_multinomial_exact():
    assert log_multinomial(6, [3, 2, 1]) == pytest.approx(math.log(60), rel=1e-15)
    assert log_multinomial(4, [5, -1]) == -math.inf
    with pytest.raises(ArgumentError):
        log_multinomial(5, [2, 2])


@pytest.mark.parametrize(
    "x,a,b,expected",
    [(0.4, 2, 4, 0.66304), (0.0, 3, 2, 0.0), (1.0, 3, 2, 1.0), (0.5, 3, 3, 0.5)],
)
def test_reg_inc_beta_points(x, a, b, expected):
    assert reg_inc_beta(x, a, b) == pytest.approx(expected, abs=1e-12)


@given(st.floats(0, 1), st.integers(1, 60), st.integers(1, 60))
def test_reg_inc_beta_matches_scipy(x, a, b):
    assert reg_inc_beta(x, a, b) == pytest.approx(sc.betainc(a, b, x), rel=1e-11, abs=1e-14)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 20), st.integers(1, 20))
def test_reg_inc_beta_monotone(x, y, a, b):
    lo, hi = sorted((x, y))
    assert reg_inc_beta(lo, a, b) <= reg_inc_beta(hi, a, b) + 1e-15
    assert reg_inc_beta(x, a + 1, b) <= reg_inc_beta(x, a, b) + 1e-15


@pytest.mark.parametrize("x,a,b", [(1.5, 1, 1), (-0.1, 1, 1), (0.5, 0, 2), (0.5, 1.5, 2)])
def test_reg_inc_beta_rejects(x, a, b):
    with pytest.raises(ArgumentError):
        reg_inc_beta(x, a, b)


def test_reg_inc_gamma_upper_point():
    assert reg_inc_gamma_upper(2, 1.0) == pytest.approx(2 / math.e, rel=1e-14)


@given(st.integers(1, 80), st.floats(0, 300))
def test_reg_inc_gamma_upper_matches_scipy(n, x):
    assert reg_inc_gamma_upper(n, x) == pytest.approx(sc.gammaincc(n, x), rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_reg_inc_gamma_upper_is_survival(n):
    xs = [0.0, 0.1, 1.0, 5.0, 20.0, 200.0]
    vals = [reg_inc_gamma_upper(n, x) for x in xs]
    assert vals[0] == 1.0
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-40


@pytest.mark.parametrize(
    "a,b,c,z",
    [
        (1, 1, 2, 0.5),
        (1, 1, 2, 0.95),
        (3, 4, 2, 0.3),
        (2.5, 1, 4, 0.97),
        (5, 1, 3, 0.91),
        (1, 6, 7, 0.99),
        (2, 3, 5, 0.999),
        (0.5, 0.5, 1.5, 0.2),
    ],
)
def test_hyp2f1_matches_mpmath(a, b, c, z):
    expected = float(mpmath.hyp2f1(a, b, c, z))
    assert hyp2f1(a, b, c, z) == pytest.approx(expected, rel=1e-12)


def test_hyp2f1_terminating_and_trivial():
    assert hyp2f1(1, -2, 1, -1) == pytest.approx(4.0, abs=1e-15)
    assert hyp2f1(3, 4, 5, 0.0) == 1.0


@given(st.floats(0, 0.98), st.integers(1, 6), st.integers(1, 6), st.integers(1, 8))
def test_hyp2f1_property(z, a, b, c):
    expected = float(mpmath.hyp2f1(a, b, c, z))
    assert hyp2f1(a, b, c, z) == pytest.approx(expected, rel=1e-10)


def test_hyp2f1_rejects_outside_disc():
    with pytest.raises(ArgumentError):
        hyp2f1(1, 1, 2, 1.2)
