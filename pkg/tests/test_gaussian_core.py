import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdsc.gaussian_core import (
    ABSENT,
    ClampWarning,
    GaussianProblem,
    RdPoint,
    TestChannelParams,
    clamp_point,
    d3_star_r1_inf,
    d3_star_sumrate,
    derived_constants,
    distortion_rate_noisy,
    qin_corner_rates,
    rate_noisy,
    test_channel_point,
)
from robustdsc.oracle_mc import gaussian_mi, joint_covariance, mmse

variances = st.floats(0.05, 20.0)
UNIT = GaussianProblem(1.0, 1.0, 1.0)


def test_problem_validation():
    with pytest.raises(ValueError):
        GaussianProblem(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        GaussianProblem(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        GaussianProblem(1.0, 1.0, 1.0, rho_n=1.5)
    with pytest.raises(ValueError):
        UNIT.noise(3)


def test_derived_constants_unit():
    k = derived_constants(UNIT)
    assert k.d1_min == pytest.approx(0.5)
    assert k.d3_min == pytest.approx(1 / 3)
    assert k.d_x == pytest.approx(2 / 3)


def test_derived_constants_correlated_noise():
    # rho = 1 with equal variances: both encoders see the same observation
    k = derived_constants(GaussianProblem(1.0, 1.0, 1.0, rho_n=1.0))
    assert k.d3_min == pytest.approx(0.5)
    k = derived_constants(GaussianProblem(1.0, 1.0, 1.0, rho_n=0.5))
    # Y1 + Y2 carries noise variance 2 + 2*0.5 = 3 on 2X, i.e. precision 4/3 for X
    assert k.d3_min == pytest.approx(1 / (1 + 4 / 3))


@settings(max_examples=200, deadline=None)
@given(variances, variances, st.floats(0.0, 8.0))
def test_rate_distortion_round_trip(s, n, R):
    prob = GaussianProblem(s, n, n)
    assert rate_noisy(prob, 1, distortion_rate_noisy(prob, 1, R)) == pytest.approx(R, abs=1e-8)


def test_rate_noisy_edges():
    with pytest.raises(ValueError):
        rate_noisy(UNIT, 1, 0.5)
    with pytest.warns(ClampWarning):
        assert rate_noisy(UNIT, 1, 2.0) == 0.0
    assert rate_noisy(UNIT, 1, 1.0) == pytest.approx(0.0, abs=1e-15)
    # noiseless: classic 1/2 log(s/D)
    assert rate_noisy(GaussianProblem(1.0, 0.0, 0.0), 1, 0.25) == pytest.approx(0.5 * math.log(4))


def test_clamp_point_moves_only_down():
    with pytest.warns(ClampWarning):
        pt, moved = clamp_point(UNIT, RdPoint(1, 1, 2.0, 0.7, 0.9))
    assert moved and (pt.d1, pt.d2, pt.d3) == (1.0, 0.7, 0.7)
    pt, moved = clamp_point(UNIT, RdPoint(1, 1, 0.6, 0.7, 0.1))
    assert not moved and pt.d3 == 0.1


@settings(max_examples=50, deadline=None)
@given(variances, variances, variances, st.floats(0.01, 50), st.floats(0.01, 50), st.floats(1, 10), st.floats(1, 10))
def test_test_channel_point_matches_mmse(s, n1, n2, w1, w2, f1, f2):
    prob = GaussianProblem(s, n1, n2)
    params = TestChannelParams(w1 * f1, w1, w2 * f2, w2)
    cov = joint_covariance(prob, params)
    d1, d2, d3 = test_channel_point(prob, params)
    assert d1 == pytest.approx(mmse(cov, ["U1"]), rel=1e-9)
    assert d2 == pytest.approx(mmse(cov, ["U2"]), rel=1e-9)
    assert d3 == pytest.approx(mmse(cov, ["W1", "W2"]), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(variances, variances, variances, st.floats(0.01, 50), st.floats(0.01, 50), st.floats(1, 10), st.floats(1, 10))
def test_corner_rates_match_log_det(s, n1, n2, w1, w2, f1, f2):
    prob = GaussianProblem(s, n1, n2)
    params = TestChannelParams(w1 * f1, w1, w2 * f2, w2)
    cov = joint_covariance(prob, params)
    rates = qin_corner_rates(prob, params)
    iu = gaussian_mi(cov, ["Y1"], ["U1"]) + gaussian_mi(cov, ["Y2"], ["U2"])
    c1 = (gaussian_mi(cov, ["Y1"], ["U1"]) + gaussian_mi(cov, ["Y1"], ["W1"], ["U1", "U2", "W2"]),
          gaussian_mi(cov, ["Y2"], ["U2"]) + gaussian_mi(cov, ["Y2"], ["W2"], ["U1", "U2"]))
    total = iu + gaussian_mi(cov, ["Y1", "Y2"], ["W1", "W2"], ["U1", "U2"])
    assert rates["corner_c1"] == pytest.approx(c1, rel=1e-7, abs=1e-10)
    assert rates["sum_rate"] == pytest.approx(total, rel=1e-7, abs=1e-10)
    assert sum(rates["corner_c2"]) == pytest.approx(total, rel=1e-9, abs=1e-12)


def test_absent_layers():
    params = TestChannelParams(ABSENT, 1.0, ABSENT, 1.0)
    d1, d2, d3 = test_channel_point(UNIT, params)
    assert d1 == d2 == 1.0
    r = qin_corner_rates(UNIT, params)
    # no coarse layer: the corner sum is the CEO sum rate I(Y1 Y2; W1 W2)
    cov = joint_covariance(UNIT, TestChannelParams(1.0, 1.0, 1.0, 1.0))
    assert r["sum_rate"] == pytest.approx(gaussian_mi(cov, ["Y1", "Y2"], ["W1", "W2"]), rel=1e-10)
    with pytest.raises(ValueError):
        qin_corner_rates(UNIT, TestChannelParams(1.0, 0.0, 1.0, 1.0))


def test_test_channel_order():
    with pytest.raises(ValueError):
        TestChannelParams(0.5, 1.0, 1.0, 1.0)


def test_d3_star_sumrate_examples():
    assert d3_star_sumrate(UNIT, 1.0) == pytest.approx(0.5081633, abs=1e-7)
    assert d3_star_sumrate(UNIT, 0.0) == pytest.approx(1.0)
    assert d3_star_sumrate(UNIT, 60.0) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        d3_star_sumrate(GaussianProblem(1.0, 1.0, 2.0), 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.01, 5.0))
def test_d3_star_sumrate_decreasing(a, b):
    lo, hi = sorted((a, b))
    if hi - lo > 1e-6:
        assert d3_star_sumrate(UNIT, hi) < d3_star_sumrate(UNIT, lo)


def test_d3_star_r1_inf_limits():
    k = derived_constants(UNIT)
    assert d3_star_r1_inf(UNIT, 0.0) == pytest.approx(k.d2_min)
    assert d3_star_r1_inf(UNIT, 60.0) == pytest.approx(k.d3_min)
    assert d3_star_r1_inf(UNIT, 0.5 * math.log(25)) == pytest.approx(0.34)


def test_rd_point_validation():
    with pytest.raises(ValueError):
        RdPoint(-1, 0, 1, 1, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert RdPoint(1, 2, 1, 1, 1).sum_rate == 3


def test_corner_reaches_ceo_vertex_without_second_coarse_layer():
    third = 1 / 3
    r = qin_corner_rates(UNIT, TestChannelParams(third, third, ABSENT, third))
    assert r["sum_rate"] == pytest.approx(0.5 * math.log(40), abs=1e-12)
    assert r["corner_c1"] == pytest.approx((0.5 * math.log(7), 0.5 * math.log(40 / 7)), abs=1e-12)
    # with both coarse layers equal to the fine ones the sum is the separate-coding sum ln 7
    r = qin_corner_rates(UNIT, TestChannelParams(third, third, third, third))
    assert r["sum_rate"] == pytest.approx(math.log(7), abs=1e-12)
