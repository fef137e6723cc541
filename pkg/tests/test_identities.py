import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from siegel_gap.arith import squarefree_coprime_to_6
from siegel_gap.characters import character
from siegel_gap.identities import (LocalFactorPolynomial, dirichlet_convolve, lemma3_partial_sum,
                                   lemma5_partial_sum, lemma7_local_check, lemma7_local_sides,
                                   lemma7_series_check, lemma7_sweep, lemma8_quadrature, series_inv, series_mul,
                                   squarefree_reciprocal_sum, two_pow_minus_omega_sum)
from siegel_gap.reports import INCONCLUSIVE, PASS


def test_series_algebra():
    one_minus_x = (1, -1)
    inv = series_inv(one_minus_x, 4)
    assert inv == (1, 1, 1, 1, 1)
    assert series_mul(one_minus_x, inv, 4) == (1, 0, 0, 0, 0)
    # (1 - x)^2 (1 + 2x) = 1 - 3x^2 + 2x^3
    assert series_mul(series_mul(one_minus_x, one_minus_x, 4), (1, 2), 4) == (1, 0, -3, 2, 0)


@pytest.mark.parametrize("p,expected_kind", [(7, -1), (5, 0), (11, 1)])
def test_local_factor_cases(p, expected_kind):
    c = character(5)
    assert c(p) == expected_kind
    lhs, rhs = lemma7_local_sides(p, 1, 1, c, 6)
    assert lhs.coeffs == rhs.coeffs
    if expected_kind == 1:
        assert lhs.coeffs[:3] == (1, 2, 0)
    else:
        assert lhs.coeffs == (1, 0, 0, 0, 0, 0, 0)


@given(st.sampled_from([p for p in range(5, 400) if all(p % k for k in range(2, p))]),
       st.sampled_from(squarefree_coprime_to_6(35)), st.sampled_from(squarefree_coprime_to_6(35)),
       st.sampled_from([5, -4, 8, -23, -7, 13, 24]))
def test_local_identity_property(p, r, t, d):
    assert lemma7_local_check(p, r, t, character(d)).passed


def test_local_mismatch_is_detected():
    a = LocalFactorPolynomial(5, (1, 2, 0))
    b = LocalFactorPolynomial(5, (1, 2, 1))
    assert a.first_mismatch(b) == 2


def test_sweep_small():
    rep = lemma7_sweep([5, 7, 11, 13], [5, -4], [(1, 1), (5, 7), (35, 35)])
    assert rep.passed and rep.measured["checks"] == 24


@pytest.mark.parametrize("d,r,t", [(5, 7, 7), (5, 1, 1), (-4, 5, 35), (8, 35, 11)])
def test_series_check(d, r, t):
    rep = lemma7_series_check(500, r, t, character(d))
    assert rep.passed and rep.measured["first_mismatch"] is None


def test_convolution():
    ones = [0] + [1] * 10
    # sum_{d|n} 1 = tau(n)
    assert dirichlet_convolve(ones, ones, 10)[1:] == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4]


@pytest.mark.parametrize("y,expected", [(0.5, 0.0), (1.0, 0.0), (2.0, 0.5), (10.0, 0.9), (100.0, 0.99)])
def test_mellin_weight(y, expected):
    rep = lemma8_quadrature(y)
    assert rep.passed
    assert abs(float(rep.measured["numeric"]) - expected) < 1e-8


def test_mellin_error_shrinks_with_V():
    e1 = float(lemma8_quadrature(3.0, V=50, tail="none", tol=1.0).measured["abs_error"])
    e2 = float(lemma8_quadrature(3.0, V=100, tail="none", tol=1.0).measured["abs_error"])
    assert e2 < e1


def test_mellin_inconclusive_without_tail():
    rep = lemma8_quadrature(2.0, V=100, tail="none")
    assert rep.verdict == INCONCLUSIVE


def test_squarefree_reciprocal_sum():
    assert lemma3_partial_sum(10).measured["sum"] == Fraction(47, 35)
    assert lemma3_partial_sum(1).measured["sum"] == 1
    assert lemma3_partial_sum(10).fitted["euler_factor_reduction"] == 2
    assert Fraction(3, 2) * Fraction(4, 3) == 2


def test_squarefree_reciprocal_sum_monotone():
    vals = [float(squarefree_reciprocal_sum(R)) for R in (10, 50, 100, 1000, 5000, 20000)]
    assert vals == sorted(vals)


def test_two_pow_minus_omega_small_values():
    assert two_pow_minus_omega_sum(10) == 5
    assert two_pow_minus_omega_sum(3) == 2
    vals = [two_pow_minus_omega_sum(x) for x in (3, 10, 100, 1000)]
    assert vals == sorted(vals)
    assert lemma5_partial_sum(10).verdict == INCONCLUSIVE


def test_two_pow_minus_omega_decade():
    rep = lemma5_partial_sum(10**5)
    assert rep.verdict == PASS
    assert 0.5 < rep.fitted["lambda"] < 0.8
