import math
import sys
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from robustdsc import gaussian_regions as gr  # noqa: E402
from robustdsc.gaussian_core import (  # noqa: E402
    ClampWarning,
    DerivedConstants,
    GaussianProblem,
    RdPoint,
    TestChannelParams,
    d3_star_sumrate,
    derived_constants,
    rate_noisy,
)

UNIT = GaussianProblem(1.0, 1.0, 1.0)
ASYM = GaussianProblem(2.0, 0.5, 3.0)


# ---------------------------------------------------------------------------
# IPPR

def test_ippr_witness_example():
    res = gr.ippr_contains(UNIT, RdPoint(1, 1, 1, 1, 0.45))
    assert res.contains
    assert res.witness[0] == pytest.approx(2 / math.expm1(2), abs=1e-12)
    assert res.witness[0] == pytest.approx(0.313035, abs=1e-6)


def test_ippr_zero_rate_is_trivial():
    assert gr.ippr_contains(UNIT, RdPoint(0, 0, 1, 1, 1)).contains
    assert not gr.ippr_contains(UNIT, RdPoint(0, 0, 1, 1, 0.9)).contains


def test_ippr_symmetric_sum_ln7():
    poly = gr.ippr_boundary(UNIT, 0.4, 401)
    i = int(np.argmin(np.abs(poly.x - poly.y)))
    assert poly.x[i] + poly.y[i] == pytest.approx(math.log(7), abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 4.0), st.floats(0.0, 4.0), st.floats(0.34, 0.99))
def test_ippr_inside_ceo_and_outer(r1, r2, d3):
    pt = RdPoint(r1, r2, 1.0, 1.0, d3)
    assume(gr.ippr_contains(UNIT, pt).margin > 1e-9)
    assert gr.ceo_contains(UNIT, r1, r2, d3).contains
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClampWarning)
        assert gr.qout_contains(UNIT, pt).contains


# ---------------------------------------------------------------------------
# CEO

def test_tilde_sigmas_examples():
    assert gr.tilde_sigmas(UNIT, 0.4) == pytest.approx((1 / 3, 1 / 3))
    t1, t2 = gr.tilde_sigmas(GaussianProblem(1.0, 1.0, 4.0), 0.9)
    assert t1 == pytest.approx(8.0) and t2 == math.inf


def test_ceo_vertices_example_and_order():
    e1, e2 = gr.ceo_vertices(UNIT, 1 / 3, 1 / 3)
    assert e1 == pytest.approx((0.9729551, 0.8714847), abs=1e-7)
    assert e2 == pytest.approx(e1[::-1], abs=1e-12)
    with pytest.raises(ValueError):
        gr.ceo_vertices(UNIT, 0.0, 1.0)


def test_ceo_vertices_asymmetric_log_det():
    from robustdsc.oracle_mc import gaussian_mi, joint_covariance

    e1, e2 = gr.ceo_vertices(ASYM, 0.7, 2.5)
    cov = joint_covariance(ASYM, TestChannelParams(0.7, 0.7, 2.5, 2.5))
    assert e1 == pytest.approx((gaussian_mi(cov, ["Y1"], ["W1"]), gaussian_mi(cov, ["Y2"], ["W2"], ["W1"])), rel=1e-9)
    assert e2 == pytest.approx((gaussian_mi(cov, ["Y1"], ["W1"], ["W2"]), gaussian_mi(cov, ["Y2"], ["W2"])), rel=1e-9)


def test_ceo_contains_errors_and_example():
    with pytest.raises(ValueError, match="infeasible distortion"):
        gr.ceo_contains(UNIT, 1, 1, 0.2)
    assert gr.ceo_contains(UNIT, 1, 1, 0.4).contains
    assert not gr.ceo_contains(UNIT, 0.9, 0.9, 0.4).contains


@pytest.mark.parametrize("prob,d3", [(UNIT, 0.4), (ASYM, 0.6), (GaussianProblem(1.0, 0.2, 0.9), 0.3)])
def test_ceo_min_sum_against_grid(prob, d3):
    exact = gr.ceo_min_sum_rate(prob, d3)
    grid = oracles.ceo_grid_min_sum(prob.sigma_x2, prob.sigma_n1_2, prob.sigma_n2_2, d3)
    assert exact <= grid + 1e-12
    assert grid - exact < 1e-2
    poly = gr.ceo_boundary(prob, d3, 300)
    assert float(np.min(poly.x + poly.y)) == pytest.approx(exact, abs=1e-9)


def _c_from_rate(prob, d3, x):
    s, n1 = prob.sigma_x2, prob.sigma_n1_2
    P, lo, hi = gr._face(prob, d3)
    f = lambda c: 0.5 * (math.log1p(s * c) - math.log1p(-n1 * c)) - x  # noqa: E731
    return brentq(f, lo, min(hi, (1 - 1e-15) / n1), xtol=1e-15)


@pytest.mark.parametrize("prob,d3", [(UNIT, 0.4), (ASYM, 0.6)])
def test_ceo_boundary_curves_are_vertices(prob, d3):
    poly = gr.ceo_boundary(prob, d3, 120)
    assert set(poly.labels) == {"A", "B", "C"}
    worst = 0.0
    for (x, y), lab in zip(poly.points, poly.labels):
        if lab != "A":
            continue
        c1 = _c_from_rate(prob, d3, x)
        e1, _ = gr.ceo_vertices(prob, *gr.ceo_boundary_witness(prob, d3, c1))
        worst = max(worst, abs(e1[0] - x), abs(e1[1] - y))
    assert worst < 1e-9


def test_ceo_boundary_points_are_tight():
    poly = gr.ceo_boundary(UNIT, 0.4, 60)
    for x, y in poly.points[::5]:
        assert gr.ceo_contains(UNIT, x, y, 0.4).margin > -1e-7
        assert gr.ceo_contains(UNIT, x - 1e-3, y, 0.4).margin < 0
        assert gr.ceo_contains(UNIT, x, y - 1e-3, 0.4).margin < 0


# ---------------------------------------------------------------------------
# partial characterization

def test_partial_characterization_items():
    R = rate_noisy(UNIT, 1, 0.55)
    res = gr.partial_char_contains(UNIT, RdPoint(max(R, 1.0), 1.0, 0.55, 1.0, 0.4), 1)
    assert res.contains
    assert not gr.partial_char_contains(UNIT, RdPoint(1.0, 1.0, 0.55, 1.0, 0.4), 1).contains
    with pytest.raises(ValueError, match="not applicable"):
        gr.partial_char_contains(UNIT, RdPoint(2, 2, 0.9, 1.0, 0.4), 1)
    with pytest.raises(ValueError, match="not applicable"):
        gr.partial_char_contains(UNIT, RdPoint(2, 2, 0.55, 0.8, 0.4), 1)
    both = gr.partial_char_contains(UNIT, RdPoint(2, 2, 0.55, 0.55, 0.4), 3)
    assert both.contains
    with pytest.raises(ValueError):
        gr.partial_char_contains(UNIT, RdPoint(2, 2, 0.55, 0.55, 0.4), 4)


# ---------------------------------------------------------------------------
# outer bound

def test_lambda_examples():
    k = DerivedConstants(0.0, 0.0, 0.0, 1.0)
    lam, case, m_hat = gr.lambda_outer(k, 0.6, 0.6, 0.3)
    assert case == "interior"
    assert lam == pytest.approx(0.5 * math.log(0.49 / 0.48), abs=1e-12)
    assert lam == pytest.approx(0.0103096, abs=1e-7)
    assert m_hat == pytest.approx(1.8)
    lam, case, _ = gr.lambda_outer(k, 0.6, 0.6, 0.5)
    assert case == "endpoint" and lam == pytest.approx(0.164252, abs=1e-6)
    assert gr.lambda_outer(k, 0.6, 0.6, 0.1) == (0.0, "zero", None)
    with pytest.raises(ValueError):
        gr.lambda_outer(k, -0.1, 0.5, 0.1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.5))
def test_lambda_array_matches_scalar(d1, d2, zeta):
    k = derived_constants(UNIT)
    d1, d2, zeta = d1 * k.d_x, d2 * k.d_x, zeta * k.d_x
    scalar = gr.lambda_outer(k, d1, d2, zeta)[0]
    vec = float(gr.lambda_outer_array(k, d1, d2, np.array([zeta]))[0])
    assert vec == scalar or abs(vec - scalar) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.0, 1.0))
def test_lambda_matches_eta_grid(a, b, f):
    k = derived_constants(UNIT)
    d1, d2 = a * k.d_x, b * k.d_x
    zeta = f * min(d1, d2)
    assert gr.lambda_outer(k, d1, d2, zeta)[0] == pytest.approx(
        oracles.eta_grid_sup(k.d_x, d1, d2, zeta), abs=1e-5)


def test_qout_examples():
    assert gr.qout_contains(UNIT, RdPoint(0, 0, 1, 1, 1)).contains
    for d3, want in ((0.40, False), (0.45, False), (0.52, True)):
        assert gr.qout_contains(UNIT, RdPoint(0.5, 0.5, 1, 1, d3)).contains is want
    # below D3_min is never contained
    assert not gr.qout_contains(UNIT, RdPoint(5, 5, 1, 1, 0.3)).contains


def test_qout_threshold_is_d3_star():
    f = lambda d: gr.qout_contains(UNIT, RdPoint(0.5, 0.5, 1, 1, d)).margin  # noqa: E731
    assert brentq(f, 0.45, 0.55, xtol=1e-12) == pytest.approx(d3_star_sumrate(UNIT, 1.0), abs=1e-8)


BRUTE_CASES = [
    (UNIT, (0.5, 0.5, 1.0, 1.0, 0.55)),
    (UNIT, (0.5, 0.5, 1.0, 1.0, 0.45)),
    (UNIT, (1.0, 0.8, 0.7, 0.8, 0.45)),
    (UNIT, (1.0, 0.8, 0.6, 0.6, 0.45)),
    (UNIT, (0.3, 1.5, 0.95, 0.6, 0.42)),
    (ASYM, (1.0, 0.5, 1.2, 1.9, 0.8)),
    (ASYM, (0.6, 0.4, 1.6, 1.9, 0.7)),
]


@pytest.mark.parametrize("prob,pt", BRUTE_CASES)
def test_qout_reduction_matches_brute_force(prob, pt):
    """Fixing r_i2 = R_i - r_i1 loses nothing against a full 4-D search."""
    res = gr.qout_contains(prob, RdPoint(*pt))
    brute = oracles.brute_qout(prob.sigma_x2, prob.sigma_n1_2, prob.sigma_n2_2, *pt)
    # the grid search is an inner approximation of the parameter set
    if brute >= 0:
        assert res.contains
    if res.margin < -1e-3:
        assert brute < 0
    if res.margin > 0.02:
        assert brute >= 0


def test_qout_witness_satisfies_every_constraint():
    rng = np.random.default_rng(3)
    for prob in (UNIT, ASYM):
        for prm in gr.sample_test_channels(rng, 40):
            for pt in gr.qin_points(prob, prm):
                res = gr.qout_contains(prob, pt)
                assert res.contains
                slacks = gr.outer_constraint_slacks(prob, pt, res.witness.params)
                assert min(slacks.values()) > -1e-6, slacks


def test_qout_needs_noise():
    with pytest.raises(ValueError):
        gr.qout_contains(GaussianProblem(1.0, 0.0, 1.0), RdPoint(1, 1, 1, 1, 0.5))
    with pytest.raises(ValueError):
        gr.qout_contains(GaussianProblem(1.0, 1.0, 1.0, rho_n=0.3), RdPoint(1, 1, 1, 1, 0.5))


def test_qout_infinite_rates_capped():
    k = derived_constants(UNIT)
    assert gr.qout_contains(UNIT, RdPoint(math.inf, math.inf, k.d1_min * 1.001, k.d2_min * 1.001,
                                          k.d3_min * 1.001)).contains


# ---------------------------------------------------------------------------
# symmetric side-distortion tradeoff

def test_d12_outer_example():
    f = gr.d12_outer(UNIT, 0.5)
    assert f["sum_floor"] == pytest.approx(1.50817, abs=1e-5)
    assert f["individual_floor"] == pytest.approx(0.71287, abs=1e-4)
    assert f["individual_floor"] == pytest.approx(math.sqrt(0.5081633), abs=1e-7)
    assert gr.d12_outer_contains(UNIT, 0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        gr.d12_outer(ASYM, 0.5)
    far = gr.d12_outer(UNIT, 30.0)
    assert far["individual_floor"] == pytest.approx(math.sqrt(1 / 3), rel=1e-9)


def test_d12_inner_curve_properties():
    R = 0.5
    curve = gr.d12_inner_curve(UNIT, R, 301)
    swapped = curve.points[:, ::-1][::-1]
    assert np.allclose(swapped, curve.points, atol=1e-12)
    for d1, d2 in curve.points:
        assert gr.d12_outer_contains(UNIT, R, d1, d2)
    rs = gr.d12_r_star(UNIT, R)
    b1 = np.array(gr.psi_branch(UNIT, R, rs, 1))
    b2 = np.array(gr.psi_branch(UNIT, R, 2 * R - rs, 2))
    assert np.allclose(b1, b2, atol=1e-9)
    phi_r = float(gr.d12_phi(UNIT, R, R))
    assert phi_r == pytest.approx(gr.d12_inner_floor(UNIT, R), abs=1e-12)
    with pytest.raises(ValueError):
        gr.psi_branch(UNIT, R, R, 3)


def test_d12_outer_boundary_corners():
    b = gr.d12_outer_boundary(UNIT, 0.5)
    f = gr.d12_outer(UNIT, 0.5)
    assert b.points[1].sum() == pytest.approx(f["sum_floor"])
    assert b.labels == ["floor", "sum", "sum", "floor"]


# ---------------------------------------------------------------------------
# extreme case, noisy MD, convexity domain, side bound

def test_extreme_min_rate_examples():
    assert gr.extreme_min_rate(UNIT, 1.0, 0.34) == pytest.approx(0.5 * math.log(25), abs=1e-12)
    # second case coincides with the single-encoder rate
    assert gr.extreme_min_rate(UNIT, 0.6, 0.45) == pytest.approx(rate_noisy(UNIT, 1, 0.6))
    assert gr.extreme_min_rate(UNIT, 1.0, 1 / 3) == math.inf
    with pytest.raises(ValueError):
        gr.extreme_min_rate(UNIT, 1.0, 0.3)


def test_noisy_md_examples():
    prob = GaussianProblem(1.0, 0.25, 0.25)
    res = gr.noisy_md_contains(prob, RdPoint(1, 1, 0.8, 0.8, 0.6))
    assert res.contains
    # unit d_X example with distortions given directly in shifted form
    noiseless = GaussianProblem(1.0, 0.0, 0.0)
    res = gr.noisy_md_contains(noiseless, RdPoint(0, 0, 0.6, 0.6, 0.5))
    assert res.witness["gamma"] == pytest.approx(0.5 * math.log(0.5 / 0.36), abs=1e-12)
    # gamma = 0 at d3 = d1 + d2 - d_X
    res = gr.noisy_md_contains(noiseless, RdPoint(0, 0, 0.8, 0.7, 0.5))
    assert res.witness["gamma"] == 0.0
    with pytest.raises(ValueError, match="infeasible"):
        gr.noisy_md_contains(prob, RdPoint(1, 1, 0.1, 0.8, 0.6))


def test_noisy_md_correlated_noise_shifts_floor():
    a = gr.noisy_md_contains(GaussianProblem(1.0, 0.25, 0.25, rho_n=0.5), RdPoint(1, 1, 0.8, 0.8, 0.6))
    b = gr.noisy_md_contains(GaussianProblem(1.0, 0.25, 0.25), RdPoint(1, 1, 0.8, 0.8, 0.6))
    assert a.margin != b.margin


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.01, 1.0))
def test_gamma_is_eta_sup(a, b, f):
    d3 = f * min(a, b)
    assert gr._gamma(1.0, a, b, d3) == pytest.approx(oracles.eta_grid_sup(1.0, a, b, d3), abs=1e-5)


@pytest.mark.parametrize("R", [0.1, 1.0, 5.0])
def test_omega_contains_diagonal(R):
    assert gr.omega_contains(UNIT, R, R)


def test_omega_rejects_far_points_and_closed_boundary():
    assert not gr.omega_contains(UNIT, 3.0, 0.0)
    x, y = (float(v) for v in gr.omega_param(UNIT, 0.7))
    assert gr.omega_margin(UNIT, x, y) == pytest.approx(0.0, abs=1e-9)
    assert gr.omega_contains(UNIT, x, y)


def test_central_bound_from_side_distortions():
    assert gr.corollary2_bound(UNIT, 0.6, 0.6) == pytest.approx(3 / 7, abs=1e-12)
    assert gr.corollary2_bound(UNIT, 1.0, 1.0) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# inner-bound samples

def test_qin_points_and_mixtures():
    prm = TestChannelParams(2.0, 0.5, 3.0, 0.4)
    a, b = gr.qin_points(UNIT, prm)
    assert a.sum_rate == pytest.approx(b.sum_rate, abs=1e-12)
    assert (a.d1, a.d2, a.d3) == (b.d1, b.d2, b.d3)
    m = gr.mix_points(a, b, 0.25)
    assert m.r1 == pytest.approx(0.25 * a.r1 + 0.75 * b.r1)
    with pytest.raises(ValueError):
        gr.mix_points(a, b, 2.0)


def test_sample_test_channels_ranges():
    rng = np.random.default_rng(0)
    ps = gr.sample_test_channels(rng, 500)
    assert all(p.t11 >= p.t12 and p.t21 >= p.t22 for p in ps)
    assert any(p.t11 == math.inf for p in ps)
    assert all(1e-2 <= p.t12 <= 1e2 for p in ps)
