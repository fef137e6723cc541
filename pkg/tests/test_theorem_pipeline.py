import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from siegel_gap.arith import SieveRangeError, squarefree_coprime_to_6
from siegel_gap.characters import character
from siegel_gap.euler_products import ContractError, P_eval, Q_accelerated
from siegel_gap.special_functions import zeta
from siegel_gap.theorem_pipeline import (EXPLORATORY, ResourceLimitError, WeightedSumSpec, aggregated_sum,
                                         bound_report, contour_decomposition, fit_c1, weighted_sum)

SF6 = squarefree_coprime_to_6(60)


def test_spec_validation():
    c = character(5)
    for beta in (0.5, 0.87, 1.0):
        with pytest.raises(ValueError):
            WeightedSumSpec(c, beta, 100.0)
    with pytest.raises(ValueError):
        WeightedSumSpec(c, 0.9, 1.5)
    with pytest.raises(ContractError):
        WeightedSumSpec(c, 0.9, 100.0, r=6)


@given(st.floats(0.875, 0.999), st.sampled_from(SF6), st.sampled_from(SF6), st.sampled_from([5, -4, 8, -23]))
def test_weighted_sum_at_y_2(beta, r, t, d):
    assert weighted_sum(WeightedSumSpec(character(d), beta, 2.0, r, t)) == mpmath.mpf(1) / 2


def test_weighted_sum_sieve_guard():
    with pytest.raises(SieveRangeError):
        weighted_sum(WeightedSumSpec(character(5), 0.9, 5000.0), sieve_limit=1000)


@pytest.mark.parametrize("d,r", [(5, 1), (-4, 5), (8, 7)])
def test_weighted_sum_nondecreasing_in_y_on_diagonal(d, r):
    c = character(d)
    vals = [weighted_sum(WeightedSumSpec(c, 0.9, y, r, r)) for y in (2, 10, 50, 200, 1000)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_aggregated_reduces_to_weighted_sum_at_R_1():
    c = character(-4)
    a = aggregated_sum(c, 0.9, 1, 500.0)
    assert a.lhs == weighted_sum(WeightedSumSpec(c, 0.9, 500.0, 1, 1))


@given(st.sampled_from([5, -4, 8, -23, 13]), st.floats(0.875, 0.99), st.integers(1, 50),
       st.floats(2.0, 3000.0))
def test_aggregated_termwise_nonnegative(d, beta, R, y):
    a = aggregated_sum(character(d), beta, R, y)
    assert a.min_term >= 0
    assert a.lhs >= a.lower_bound - 1e-12


@pytest.mark.parametrize("d", [5, -4])
def test_aggregated_at_y_2_is_exact_lower_bound(d):
    a = aggregated_sum(character(d), 0.9, 35, 2.0)
    assert a.lhs == a.lower_bound


def test_aggregated_resource_guard():
    with pytest.raises(ResourceLimitError) as e:
        aggregated_sum(character(5), 0.9, 50, 1e7, work_limit=10**6)
    assert e.value.required == 5 * 10**8
    with pytest.raises(ResourceLimitError):
        aggregated_sum(character(5), 0.9, 2000, 2.0)


def test_main_term_scales_like_y_power():
    c = character(5)
    a1 = aggregated_sum(c, 0.9, 10, 100.0)
    a2 = aggregated_sum(c, 0.9, 10, 1000.0)
    assert a2.rhs_main / a1.rhs_main == pytest.approx(10**0.1, rel=1e-20)


def test_bound_report_algebra():
    b = bound_report(1000003, 3.0)
    assert b.chain_lhs == pytest.approx(3.0, rel=1e-13)
    assert b.c == pytest.approx(math.log(3) / 32, rel=1e-15)
    assert b.c == pytest.approx(0.03433, abs=1e-5)
    assert b.R_exceeds_q and b.log_y == pytest.approx(32 * b.log_R)
    assert b.chain_rhs_at_bound == pytest.approx(3.0, rel=1e-12)
    assert b.label == EXPLORATORY


@given(st.integers(3, 10**12), st.floats(0.01, 100))
def test_bound_gap_scaling(q, c1):
    b1, b2 = bound_report(q, c1), bound_report(2 * q, c1)
    assert b1.chain_lhs == pytest.approx(3.0, rel=1e-9)
    ratio = b2.gap / b1.gap
    assert ratio == pytest.approx((math.log(q) / math.log(2 * q)) ** (4 / 3), rel=1e-12)


def test_bound_report_rejects_bad_input():
    with pytest.raises(ValueError):
        bound_report(2, 3.0)
    with pytest.raises(ValueError):
        bound_report(100, 0.0)


def test_fit_c1_is_minimum_over_runs():
    c = character(5)
    runs = [aggregated_sum(c, 0.9, R, y) for R in (10, 35) for y in (100.0, 1e4)]
    c1 = fit_c1(runs)
    assert c1 > 0
    with pytest.raises(ValueError):
        fit_c1([aggregated_sum(c, 0.9, 1, 100.0)])


def test_contour_small_case_closes():
    spec = WeightedSumSpec(character(8), 0.9, 50.0, 1, 1)
    dec = contour_decomposition(spec, threads=2)
    assert dec.verdict == "pass"
    assert dec.identity_defect <= dec.error_budget
    assert dec.relative_defect < 1e-3


def test_zero_residue_proportional_to_L_at_beta():
    c = character(-4)
    spec = WeightedSumSpec(c, 0.95, 20.0, 5, 5)
    dec = contour_decomposition(spec, V=64.0, threads=1)
    with mpmath.workdps(30):
        factor = zeta(0.95).value * Q_accelerated(c, 0.95).value * mpmath.re(P_eval(c, 5, 5, 0.95))
        assert dec.zero_residue / dec.L_at_beta == pytest.approx(float(factor), rel=1e-20)
