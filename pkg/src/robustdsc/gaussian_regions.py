"""Membership tests, boundary tracing and bound formulas for the Gaussian regions.

Most sweeps over a pair of test channels ``(t1, t2)`` are parametrized by the
channel output precisions ``c_i = 1/(n_i + t_i)``.  The central-decoder MMSE
is then ``(1/s + c1 + c2)^-1``, so the distortion-tight face is the segment
``c1 + c2 = 1/D3 - 1/s`` and every rate has a log1p form without
cancellation.  ``c_i = 0`` is an absent description.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np

from .convex_tools import BoundaryPolyline, scalar_max, scalar_root
from .gaussian_core import (
    ABSENT,
    ClampWarning,
    DerivedConstants,
    GaussianProblem,
    RdPoint,
    TestChannelParams,
    clamp_point,
    d3_star_sumrate,
    derived_constants,
    qin_corner_rates,
    rate_noisy,
    test_channel_point,
)

TOL = 1e-7
RATE_CAP = 60.0
CEO_TAGS = ("A", "B", "C")


@dataclass(frozen=True)
class OuterParams:
    r11: float
    r12: float
    r21: float
    r22: float

    def __post_init__(self):
        if min(self.r11, self.r12, self.r21, self.r22) < 0:
            raise ValueError("outer-bound rates must be nonnegative")


@dataclass(frozen=True)
class OuterWitness:
    params: OuterParams
    zeta: float
    lambda_val: float
    sigma_m2_hat: float | None


@dataclass(frozen=True)
class MembershipResult:
    contains: bool
    margin: float
    witness: Any = None

    def __bool__(self):
        return self.contains


def _result(margin: float, witness=None, tol: float = TOL) -> MembershipResult:
    margin = float(margin)
    return MembershipResult(bool(margin >= -tol), margin, witness)


def _independent(problem: GaussianProblem):
    if problem.rho_n != 0:
        raise ValueError("this region assumes independent observation noises")


def _precision(n: float, t: float) -> float:
    if t == ABSENT:
        return 0.0
    v = n + t
    return math.inf if v == 0 else 1.0 / v


def _half_log_prec(s, n, c):
    """I(Y;W) for a single channel of output precision c (vectorized)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return 0.5 * (np.log1p(s * c) - np.log1p(-n * c))


def _ceo_rates(s, n1, n2, c1, c2):
    """(I(Y1;W1), I(Y2;W2), I(Y1;W1|W2), I(Y2;W2|W1), I(Y1Y2;W1W2)) from precisions."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        l12 = np.log1p(s * (c1 + c2))
        g1 = -np.log1p(-n1 * c1)
        g2 = -np.log1p(-n2 * c2)
        i1 = 0.5 * (np.log1p(s * c1) + g1)
        i2 = 0.5 * (np.log1p(s * c2) + g2)
        i1g2 = 0.5 * (l12 - np.log1p(s * c2) + g1)
        i2g1 = 0.5 * (l12 - np.log1p(s * c1) + g2)
        total = 0.5 * (l12 + g1 + g2)
    return i1, i2, i1g2, i2g1, total


def _cmax(n: float) -> float:
    return math.inf if n == 0 else 1.0 / n


def _face(problem: GaussianProblem, d3: float) -> tuple[float, float, float]:
    """Total precision P and the admissible c1 interval on the face c1 + c2 = P."""
    s = problem.sigma_x2
    P = max(1.0 / d3 - 1.0 / s, 0.0)
    lo = max(0.0, P - _cmax(problem.sigma_n2_2))
    hi = min(P, _cmax(problem.sigma_n1_2))
    return P, lo, hi


def _check_d3(problem: GaussianProblem, d3: float) -> DerivedConstants:
    k = derived_constants(problem)
    if d3 < k.d3_min * (1 - 1e-12):
        raise ValueError(f"infeasible distortion: d3={d3} < D3_min={k.d3_min}")
    return k


# ---------------------------------------------------------------------------
# independent per-encoder quantization (IPPR)

def ippr_test_channels(problem: GaussianProblem, r1: float, r2: float) -> tuple[float, float]:
    """Smallest admissible test-channel variances at rates ``(r1, r2)``."""
    s = problem.sigma_x2
    out = []
    for i, r in ((1, r1), (2, r2)):
        if r == 0:
            out.append(ABSENT)
        elif r == math.inf:
            out.append(0.0)
        else:
            out.append((s + problem.noise(i)) / math.expm1(2 * r))
    return out[0], out[1]


def ippr_contains(problem: GaussianProblem, point: RdPoint) -> MembershipResult:
    _independent(problem)
    point, _ = clamp_point(problem, point)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    t1, t2 = ippr_test_channels(problem, point.r1, point.r2)
    c1, c2 = _precision(n1, t1), _precision(n2, t2)
    got = [1 / (1 / s + c1), 1 / (1 / s + c2), 1 / (1 / s + c1 + c2)]
    want = [point.d1, point.d2, point.d3]
    margin = min(w - g for w, g in zip(want, got))
    return _result(margin, (t1, t2))


def ippr_boundary(problem: GaussianProblem, d3: float, n_samples: int = 200) -> BoundaryPolyline:
    """Lower-left boundary of the IPPR rate region with trivial side decoders."""
    _independent(problem)
    _check_d3(problem, d3)
    P, lo, hi = _face(problem, d3)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    c1 = _interior_samples(lo, hi, n_samples, n1, n2, P)
    r1 = _half_log_prec(s, n1, c1)
    r2 = _half_log_prec(s, n2, P - c1)
    pts = np.column_stack([r1, r2])
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    return BoundaryPolyline(pts[np.argsort(pts[:, 0], kind="stable")], ["IPPR"] * len(pts))


def _interior_samples(lo, hi, n, n1, n2, P):
    """c1 samples on [lo, hi], clustered toward endpoints where a rate diverges."""
    if hi <= lo:
        return np.array([lo])
    u = np.linspace(0.0, 1.0, n)
    # cosine spacing puts more samples near both endpoints
    c = lo + (hi - lo) * 0.5 * (1 - np.cos(np.pi * u))
    lo_inf = n2 * (P - lo) >= 1
    hi_inf = n1 * hi >= 1
    span = hi - lo
    if lo_inf:
        c[0] = lo + 1e-9 * span
    if hi_inf:
        c[-1] = hi - 1e-9 * span
    return c


# ---------------------------------------------------------------------------
# CEO rate region (central decoder only)

def ceo_vertices(problem: GaussianProblem, t1: float, t2: float):
    """Vertices ``E1 = (I(Y1;W1), I(Y2;W2|W1))`` and ``E2 = (I(Y1;W1|W2), I(Y2;W2))``."""
    _independent(problem)
    if not (t1 > 0 and t2 > 0):
        raise ValueError("test-channel variances must be positive")
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    c1, c2 = _precision(n1, t1), _precision(n2, t2)
    i1, i2, i1g2, i2g1, _ = (float(v) for v in _ceo_rates(s, n1, n2, c1, c2))
    return (i1, i2g1), (i1g2, i2)


def _ceo_margin(problem, r1, r2, P):
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2

    def margin(c1):
        _, _, a, b, tot = _ceo_rates(s, n1, n2, c1, P - c1)
        m = min(r1 - float(a), r2 - float(b), r1 + r2 - float(tot))
        return -math.inf if math.isnan(m) else m
    return margin


def ceo_contains(problem: GaussianProblem, r1: float, r2: float, d3: float) -> MembershipResult:
    """Whether ``(r1, r2)`` admits a central distortion ``d3`` (no side constraints).

    On the face the margin ``min(R1 - I(Y1;W1|W2), R2 - I(Y2;W2|W1), R1+R2 - I)``
    is quasi-concave in ``c1``, so a bounded scalar maximization decides it.
    """
    _independent(problem)
    _check_d3(problem, d3)
    r1, r2 = min(r1, RATE_CAP), min(r2, RATE_CAP)
    n1, n2 = problem.sigma_n1_2, problem.sigma_n2_2
    P, lo, hi = _face(problem, d3)
    f = _ceo_margin(problem, r1, r2, P)
    if hi - lo <= 1e-15 * max(1.0, P):
        c1 = lo
        m = f(c1)
    else:
        c1, m = scalar_max(f, lo, hi)
    c2 = P - c1
    witness = (1 / c1 - n1 if c1 > 0 else ABSENT, 1 / c2 - n2 if c2 > 0 else ABSENT)
    return _result(m, witness)


def tilde_sigmas(problem: GaussianProblem, d3: float) -> tuple[float, float]:
    """Test-channel variances at the minimum-sum-rate point of the ``d3`` face."""
    _independent(problem)
    k = _check_d3(problem, d3)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    if d3 > s * (1 + 1e-12):
        raise ValueError("d3 must not exceed sigma_x2")
    if n1 == 0 or n2 == 0:
        c1 = _min_sum_c1(problem, d3)
        P = 1 / d3 - 1 / s
        return _t_from_c(n1, c1), _t_from_c(n2, P - c1)
    inv3 = 1 / d3
    cond = 2 / max(n1, n2) + inv3 - 1 / k.d3_min
    if cond >= 0:
        t1 = n1 * (1 / k.d3_min - inv3) / (1 / n1 - 1 / k.d2_min + inv3)
        t2 = n2 * (1 / k.d3_min - inv3) / (1 / n2 - 1 / k.d1_min + inv3)
        return max(t1, 0.0), max(t2, 0.0)
    P = inv3 - 1 / s
    # n_i / D_i,min written as n_i/s + 1 so the noiseless limit is finite
    t1 = ABSENT if n1 >= n2 else _safe_div(n1 / s + 1 - n1 * inv3, P)
    t2 = ABSENT if n2 >= n1 else _safe_div(n2 / s + 1 - n2 * inv3, P)
    return t1, t2


def _safe_div(a, b):
    return math.inf if b == 0 else a / b


def _t_from_c(n, c):
    return ABSENT if c <= 0 else max(1 / c - n, 0.0)


def _min_sum_c1(problem: GaussianProblem, d3: float) -> float:
    """c1 minimizing the face sum rate, i.e. maximizing (1 - n1 c1)(1 - n2 c2)."""
    n1, n2 = problem.sigma_n1_2, problem.sigma_n2_2
    P, lo, hi = _face(problem, d3)
    if n1 == 0 and n2 == 0:
        c = P / 2
    elif n1 == 0:
        c = hi
    elif n2 == 0:
        c = lo
    else:
        c = (n2 - n1 + n1 * n2 * P) / (2 * n1 * n2)
    return min(max(c, lo), hi)


def ceo_boundary(problem: GaussianProblem, d3: float, n_samples: int = 300) -> BoundaryPolyline:
    """Lower-left boundary of the CEO rate region, sorted by R1.

    ``C`` collects E2 vertices (small R1), ``B`` the minimum-sum-rate face and
    ``A`` the E1 vertices.
    """
    _independent(problem)
    k = _check_d3(problem, d3)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    if not (k.d3_min < d3 < s):
        raise ValueError("d3 must lie strictly between D3_min and sigma_x2")
    n_samples = max(int(n_samples), 9)
    P, lo, hi = _face(problem, d3)
    cstar = _min_sum_c1(problem, d3)
    n_side = n_samples // 3
    n_mid = n_samples - 2 * n_side

    def offsets(width, diverges):
        # distances from the far endpoint, geometric when the rate blows up there
        if width <= 0:
            return np.array([0.0])
        if diverges:
            return width * np.geomspace(1e-6, 1.0, n_side)
        return np.linspace(0.0, width, n_side)

    c_left = lo + offsets(cstar - lo, n2 * (P - lo) >= 1)
    c_right = (hi - offsets(hi - cstar, n1 * hi >= 1))[::-1]

    _, _, e2x, _, _ = _ceo_rates(s, n1, n2, c_left, P - c_left)
    _, e2y, _, _, _ = _ceo_rates(s, n1, n2, c_left, P - c_left)
    e1x, _, _, e1y, _ = _ceo_rates(s, n1, n2, c_right, P - c_right)
    curve_c = np.column_stack([e2x, e2y])
    curve_a = np.column_stack([e1x, e1y])
    w = np.linspace(0.0, 1.0, n_mid)[:, None]
    seg_b = (1 - w) * curve_c[-1] + w * curve_a[0]
    parts = [(curve_c, "C"), (seg_b, "B"), (curve_a, "A")]
    pts, labels = [], []
    for arr, tag in parts:
        ok = np.all(np.isfinite(arr), axis=1)
        pts.append(arr[ok])
        labels += [tag] * int(ok.sum())
    pts = np.vstack(pts)
    order = np.argsort(pts[:, 0], kind="stable")
    return BoundaryPolyline(pts[order], [labels[i] for i in order])


def ceo_boundary_witness(problem: GaussianProblem, d3: float, c1: float) -> tuple[float, float]:
    """Test-channel variances of the face point with first precision ``c1``."""
    P, _, _ = _face(problem, d3)
    return _t_from_c(problem.sigma_n1_2, c1), _t_from_c(problem.sigma_n2_2, P - c1)


def ceo_min_sum_rate(problem: GaussianProblem, d3: float) -> float:
    _independent(problem)
    _check_d3(problem, d3)
    P, _, _ = _face(problem, d3)
    c1 = _min_sum_c1(problem, d3)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    return float(_ceo_rates(s, n1, n2, c1, P - c1)[4])


def partial_char_contains(problem: GaussianProblem, point: RdPoint, item: int) -> MembershipResult:
    """Exact membership on the distortion ranges where side decoders cost no extra rate."""
    if item not in (1, 2, 3):
        raise ValueError("item must be 1, 2 or 3")
    s = problem.sigma_x2
    k = derived_constants(problem)
    t1, t2 = tilde_sigmas(problem, point.d3)
    upper = []
    for i, t in ((1, t1), (2, t2)):
        v = problem.noise(i) + t
        upper.append(s if v == math.inf else s * v / (s + v))

    def in_range(i):
        d = (point.d1, point.d2)[i - 1]
        return k.d_min(i) * (1 - 1e-12) <= d <= upper[i - 1] * (1 + 1e-12)

    active = {1: (1,), 2: (2,), 3: (1, 2)}[item]
    for i in active:
        if not in_range(i):
            raise ValueError("characterization not applicable: side distortion outside its range")
    for i in {1, 2} - set(active):
        if (point.d1, point.d2)[i - 1] < s:
            raise ValueError("characterization not applicable: inactive side decoder must be trivial")

    def rate_floor(i):
        d = (point.d1, point.d2)[i - 1]
        try:
            return rate_noisy(problem, i, d)
        except ValueError:
            return math.inf

    slacks = [(point.r1, point.r2)[i - 1] - rate_floor(i) for i in active]
    witness = None
    if item != 3:
        ceo = ceo_contains(problem, point.r1, point.r2, point.d3)
        slacks.append(ceo.margin)
        witness = ceo.witness
    return _result(min(slacks), witness)


# ---------------------------------------------------------------------------
# outer bound

def eta(m, d_x: float, d1: float, d2: float, zeta: float):
    m = np.asarray(m, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 0.5 * np.log((d_x + m) * (zeta + m) / ((d1 + m) * (d2 + m)))


def _lambda_middle(dx, d1, d2, zeta):
    """Middle-case value ``1/2 log(g^2 / (g^2 - (a - b)^2))`` with ``g = dx - zeta``.

    The denominator is factored as ``(g - a + b)(g + a - b)`` and ``dx - a``
    is formed without subtraction, which keeps tiny distortions accurate.
    """
    zeta = np.asarray(zeta, dtype=float)
    a = math.sqrt((dx - d1) * (dx - d2))
    b = np.sqrt(np.maximum((d1 - zeta) * (d2 - zeta), 0.0))
    g = dx - zeta
    low = (dx * (d1 + d2) - d1 * d2) / (dx + a) - zeta + b
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * (2 * np.log(g) - np.log(low) - np.log(g + a - b))
    return np.where(low > 0, val, math.inf)


def lambda_outer(constants: DerivedConstants, d1: float, d2: float, zeta: float):
    """Supremum over the auxiliary variance of ``eta``; returns ``(lambda, case, m_hat)``."""
    dx = constants.d_x
    if d1 < 0 or d2 < 0 or zeta < 0:
        raise ValueError("shifted distortions and zeta must be nonnegative")
    if d1 > dx or d2 > dx:
        warnings.warn("shifted side distortion above d_X clamped", ClampWarning, stacklevel=2)
        d1, d2 = min(d1, dx), min(d2, dx)
    if zeta <= d1 + d2 - dx:
        return 0.0, "zero", None
    if d1 * d2 == 0:
        if zeta == 0:
            return 0.5 * math.log(dx / (d1 + d2)) if d1 + d2 > 0 else math.inf, "endpoint", 0.0
        return math.inf, "endpoint", 0.0
    if zeta * (dx * (d1 + d2) - d1 * d2) >= d1 * d2 * dx:
        return 0.5 * (math.log(dx) + math.log(zeta) - math.log(d1) - math.log(d2)), "endpoint", 0.0
    lam = float(_lambda_middle(dx, d1, d2, zeta))
    m_hat = (d1 * d2 - dx * zeta + math.sqrt((dx - d1) * (dx - d2) * (d1 - zeta) * (d2 - zeta))) / (
        dx + zeta - d1 - d2)
    return max(lam, 0.0), "interior", m_hat


def _gamma(dx: float, d1: float, d2: float, d3: float) -> float:
    if d3 <= d1 + d2 - dx:
        return 0.0
    if d1 * d2 == 0 or d3 == 0:
        return math.inf if d3 == 0 else 0.0
    if d3 * (dx * (d1 + d2) - d1 * d2) >= d1 * d2 * dx:
        return 0.5 * (math.log(dx) + math.log(d3) - math.log(d1) - math.log(d2))
    return float(_lambda_middle(dx, d1, d2, d3))


def _zeta(problem, k, d3, r12, r22):
    n1, n2 = problem.sigma_n1_2, problem.sigma_n2_2
    return d3 * k.d3_min * (np.exp(-2 * r12) / n1 + np.exp(-2 * r22) / n2)


def _sigma_out_hi(s, n, R):
    """Largest r_i1 with r_i2 = R - r_i1 satisfying the Sigma_out constraint."""
    if R == 0:
        return 0.0

    def g(r):
        return 0.5 * math.log1p(s * -math.expm1(-2 * (R - r)) / n) - r
    return scalar_root(g, (0.0, R))


def lambda_outer_array(constants: DerivedConstants, d1: float, d2: float, zeta) -> np.ndarray:
    """Vectorized ``lambda`` over an array of ``zeta`` (value only)."""
    dx = constants.d_x
    d1, d2 = min(d1, dx), min(d2, dx)
    z = np.asarray(zeta, dtype=float)
    out = np.zeros_like(z)
    if d1 * d2 == 0:
        edge = 0.5 * math.log(dx / (d1 + d2)) if d1 + d2 > 0 else math.inf
        big = z > d1 + d2 - dx
        out[big] = np.where(z[big] == 0, edge, math.inf)
        return out
    zero = z <= d1 + d2 - dx
    end = ~zero & (z * (dx * (d1 + d2) - d1 * d2) >= d1 * d2 * dx)
    mid = ~zero & ~end
    with np.errstate(divide="ignore", invalid="ignore"):
        out[end] = 0.5 * (math.log(dx) + np.log(z[end]) - math.log(d1) - math.log(d2))
        out[mid] = np.maximum(_lambda_middle(dx, d1, d2, z[mid]), 0.0)
    return out


def _waterfill(q, xl, xh, yl, yh):
    """Split ``q = x + y`` inside the box maximizing ``log x + log y``."""
    bps = np.unique([xl, xh, yl, yh])
    level = np.clip(bps, xl, xh) + np.clip(bps, yl, yh)
    nu = np.interp(q, level, bps)
    return np.clip(nu, xl, xh), np.clip(nu, yl, yh)


def qout_contains(problem: GaussianProblem, point: RdPoint, grid: int = 1025) -> MembershipResult:
    """Outer-bound membership with ``r_i2 = R_i - r_i1``.

    The central constraint and ``zeta`` depend on ``(r11, r21)`` only through
    ``Q = exp(-2 r12)/n1 + exp(-2 r22)/n2``.  For fixed ``Q`` the best split
    maximizes ``r11 + r21`` (water-filling inside the box), so the search is
    one-dimensional in ``Q``: a dense scan refined by zooming around the peak.
    """
    _independent(problem)
    if problem.sigma_n1_2 <= 0 or problem.sigma_n2_2 <= 0:
        raise ValueError("outer bound needs positive noise variances")
    point, _ = clamp_point(problem, point)
    point = RdPoint(min(point.r1, RATE_CAP), min(point.r2, RATE_CAP), point.d1, point.d2, point.d3)
    k = derived_constants(problem)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    if point.d3 < k.d3_min * (1 - 1e-12):
        return _result(0.5 * math.log(point.d3 / k.d3_min))
    bounds = []
    for i, R, D in ((1, point.r1, point.d1), (2, point.r2, point.d2)):
        lo = max(0.0, 0.5 * math.log(s / D)) if D > 0 else math.inf
        hi = _sigma_out_hi(s, problem.noise(i), R)
        if lo > hi + 1e-15:
            return _result(hi - lo)
        bounds.append((lo, max(lo, hi)))
    (lo1, hi1), (lo2, hi2) = bounds
    # x = exp(-2 r12)/n1 as a function of r11, likewise y
    la, lb = -2 * point.r1 - math.log(n1), -2 * point.r2 - math.log(n2)
    xl, xh = math.exp(la + 2 * lo1), math.exp(la + 2 * hi1)
    yl, yh = math.exp(lb + 2 * lo2), math.exp(lb + 2 * hi2)
    q_lo, q_hi = xl + yl, min(xh + yh, (1 - 1e-15) / k.d3_min)
    d1, d2, d3 = point.d1 - k.d3_min, point.d2 - k.d3_min, point.d3
    base = 0.5 * math.log(s / d3)

    def margin(q):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        x, y = _waterfill(q, xl, xh, yl, yh)
        r11 = 0.5 * (np.log(x) - la)
        r21 = 0.5 * (np.log(y) - lb)
        lam = lambda_outer_array(k, d1, d2, d3 * k.d3_min * q)
        with np.errstate(divide="ignore", invalid="ignore"):
            slack_d3 = 0.5 * np.log(d3 * (1 / k.d3_min - q))
        m = np.minimum(r11 + r21 - base - lam, slack_d3)
        return np.where(np.isnan(m), -np.inf, m), r11, r21

    if q_hi <= q_lo:
        qs = np.array([q_lo])
    else:
        u = np.linspace(0.0, 1.0, grid)
        qs = np.unique(np.concatenate([q_lo + (q_hi - q_lo) * u,
                                       q_lo + (q_hi - q_lo) * np.geomspace(1e-12, 1.0, grid // 4)]))
    best_q, best_m = q_lo, -math.inf
    for _ in range(4):
        vals = margin(qs)[0]
        j = int(np.argmax(vals))
        if vals[j] > best_m:
            best_q, best_m = float(qs[j]), float(vals[j])
        a, b = qs[max(j - 1, 0)], qs[min(j + 1, len(qs) - 1)]
        if not b > a:
            break
        qs = np.linspace(a, b, 65)
    _, r11, r21 = margin(best_q)
    r11, r21 = float(r11[0]), float(r21[0])
    params = OuterParams(r11, max(point.r1 - r11, 0.0), r21, max(point.r2 - r21, 0.0))
    zeta = d3 * k.d3_min * best_q
    lam, _, m_hat = lambda_outer(k, d1, d2, zeta)
    return _result(best_m, OuterWitness(params, zeta, lam, m_hat))


def outer_constraint_slacks(problem: GaussianProblem, point: RdPoint, params: OuterParams) -> dict:
    """Every outer-bound constraint slack for explicit parameters (used to audit witnesses)."""
    k = derived_constants(problem)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    out = {}
    for i, (ra, rb, n, D, R) in enumerate(((params.r11, params.r12, n1, point.d1, point.r1),
                                           (params.r21, params.r22, n2, point.d2, point.r2)), 1):
        out[f"sigma_out_{i}"] = 1 / s - math.exp(2 * ra) / s - math.expm1(-2 * rb) / n
        out[f"side_{i}"] = math.exp(2 * ra) / s - 1 / D
        out[f"rate_{i}"] = R - ra - rb
    out["central"] = 1 / s - math.expm1(-2 * params.r12) / n1 - math.expm1(-2 * params.r22) / n2 - 1 / point.d3
    zeta = float(_zeta(problem, k, point.d3, params.r12, params.r22))
    lam = lambda_outer(k, point.d1 - k.d3_min, point.d2 - k.d3_min, zeta)[0]
    out["sum"] = params.r11 + params.r21 - 0.5 * math.log(s / point.d3) - lam
    return out


# ---------------------------------------------------------------------------
# symmetric side-distortion tradeoff at equal rates

def _symmetric(problem: GaussianProblem):
    _independent(problem)
    if not problem.symmetric:
        raise ValueError("symmetric noise variances required")


def d12_outer(problem: GaussianProblem, R: float) -> dict:
    _symmetric(problem)
    if not R > 0:
        raise ValueError("rate must be positive")
    s = problem.sigma_x2
    d3 = d3_star_sumrate(problem, 2 * R)
    return {"sum_floor": d3 + s, "individual_floor": math.sqrt(s * d3), "d3_star": d3}


def d12_outer_contains(problem: GaussianProblem, R: float, d1: float, d2: float) -> bool:
    f = d12_outer(problem, R)
    return d1 + d2 >= f["sum_floor"] - TOL and min(d1, d2) >= f["individual_floor"] - TOL


def _d12_pieces(problem: GaussianProblem, R: float):
    s, n = problem.sigma_x2, problem.sigma_n1_2
    d3 = d3_star_sumrate(problem, 2 * R)
    K = 2 * d3 * s - s * n + d3 * n
    r_star = 0.5 * math.log(4 * d3 * s * s / ((s + d3) * K))

    def phi(x):
        return (K * np.exp(2 * (2 * R - np.asarray(x, dtype=float))) - 2 * d3 * s) / (s - d3)
    return d3, r_star, phi


def d12_phi(problem: GaussianProblem, R: float, x):
    _symmetric(problem)
    return _d12_pieces(problem, R)[2](x)


def d12_r_star(problem: GaussianProblem, R: float) -> float:
    _symmetric(problem)
    return _d12_pieces(problem, R)[1]


def psi_branch(problem: GaussianProblem, R: float, mu, branch: int):
    """Points ``(D1, D2)`` of the inner tradeoff curve for parameter ``mu``."""
    _symmetric(problem)
    s = problem.sigma_x2
    _, rs, phi = _d12_pieces(problem, R)
    mu = np.asarray(mu, dtype=float)
    if branch == 1:
        den = 2 * R - rs - mu
        d1 = ((R - rs) * s + (R - mu) * phi(2 * R - rs)) / den
        d2 = ((R - rs) * phi(2 * R - mu) + (R - mu) * s) / den
    elif branch == 2:
        den = rs - mu
        d1 = ((R - mu) * s + (rs - R) * phi(mu)) / den
        d2 = ((R - mu) * phi(2 * R - rs) + (rs - R) * s) / den
    else:
        raise ValueError("branch must be 1 or 2")
    return d1, d2


def d12_inner_curve(problem: GaussianProblem, R: float, n_samples: int = 200) -> BoundaryPolyline:
    """Lower-left boundary of the achievable ``(D1, D2)`` set at equal rates ``R``."""
    _symmetric(problem)
    if not R > 0:
        raise ValueError("rate must be positive")
    s = problem.sigma_x2
    d3, rs, phi = _d12_pieces(problem, R)
    if rs > R + 1e-12:
        raise ValueError("R* exceeds R")
    half = max(int(n_samples) // 2, 2)
    if R - rs <= 1e-14:
        v = float(phi(R))
        return BoundaryPolyline([[v, s], [s, v]], ["floor", "floor"])
    mu1 = np.linspace(rs, R, half)
    b1 = np.column_stack(psi_branch(problem, R, mu1, 1))
    # branch 2 is the mirror image of branch 1 under mu -> 2R - mu
    b2 = b1[:, ::-1]
    pts = np.vstack([b2, b1[1:]])
    labels = ["psi2"] * len(b2) + ["psi1"] * (len(b1) - 1)
    order = np.argsort(pts[:, 0], kind="stable")
    pts, labels = pts[order], [labels[i] for i in order]
    labels[0] = labels[-1] = "floor"
    return BoundaryPolyline(pts, labels)


def d12_inner_floor(problem: GaussianProblem, R: float) -> float:
    _symmetric(problem)
    s = problem.sigma_x2
    d3 = d3_star_sumrate(problem, 2 * R)
    return 2 * math.sqrt(d3 * s) / (math.sqrt(s) + math.sqrt(d3))


# ---------------------------------------------------------------------------
# extreme case, noisy multiple descriptions, convexity domain, side bound

def extreme_min_rate(problem: GaussianProblem, d1: float, d3: float) -> float:
    """Minimum R1 when encoder 2 has unlimited rate."""
    _independent(problem)
    k = _check_d3(problem, d3)
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    if d1 < k.d1_min * (1 - 1e-12):
        raise ValueError("d1 below D1_min")
    d1 = min(d1, s)
    if d3 <= d1 * n2 / (d1 + n2):
        den = (n2 + d1) * (d3 * (s * n1 + s * n2 + n1 * n2) - s * n1 * n2)
        if den <= 0:
            return math.inf
        return 0.5 * math.log(s * s * n2 * n2 / den)
    try:
        return rate_noisy(problem, 1, d1)
    except ValueError:
        return math.inf


def noisy_md_contains(problem: GaussianProblem, point: RdPoint) -> MembershipResult:
    """Membership when both encoders see both observations (a shifted Gaussian MD region)."""
    k = derived_constants(problem)
    for d in (point.d1, point.d2, point.d3):
        if d < k.d3_min * (1 - 1e-12):
            raise ValueError("infeasible: distortion below D3_min")
    dx = k.d_x
    d1 = min(max(point.d1 - k.d3_min, 0.0), dx)
    d2 = min(max(point.d2 - k.d3_min, 0.0), dx)
    d3 = min(max(point.d3 - k.d3_min, 0.0), d1, d2)

    def floor(d):
        return math.inf if d == 0 else 0.5 * math.log(dx / d)

    g = _gamma(dx, d1, d2, d3)
    slacks = [point.r1 - floor(d1), point.r2 - floor(d2), point.r1 + point.r2 - floor(d3) - g]
    return _result(min(slacks), {"d": (d1, d2, d3), "gamma": g})


def omega_param(problem: GaussianProblem, alpha):
    """Parametric lower boundary ``(x1, y1)`` of the convexity domain; the upper is its mirror."""
    _symmetric(problem)
    s, n = problem.sigma_x2, problem.sigma_n1_2
    a = np.asarray(alpha, dtype=float)
    e = -np.expm1(-2 * a)
    x = 0.5 * np.log1p(s * e / n) + a
    y = 0.5 * (np.log1p(2 * s * e / n) - np.log1p(s * e / n)) + a
    return x, y


def _invert_increasing(fn, target: float) -> float:
    if target == 0:
        return 0.0
    return scalar_root(lambda a: float(fn(a)) - target, (0.0, target))


def omega_margin(problem: GaussianProblem, r1: float, r2: float) -> float:
    _symmetric(problem)
    if r1 < 0 or r2 < 0:
        return -math.inf
    a1 = _invert_increasing(lambda a: omega_param(problem, a)[0], r1)
    lower = float(omega_param(problem, a1)[1])
    a2 = _invert_increasing(lambda a: omega_param(problem, a)[1], r1)
    upper = float(omega_param(problem, a2)[0])
    return min(r2 - lower, upper - r2)


def omega_contains(problem: GaussianProblem, r1: float, r2: float, tol: float = 1e-9) -> bool:
    return omega_margin(problem, r1, r2) >= -tol


def corollary2_bound(problem: GaussianProblem, d1: float, d2: float) -> float:
    """Smallest central distortion compatible with rate-distortion-optimal side decoders."""
    s = problem.sigma_x2
    return 1 / (1 / d1 + 1 / d2 - 1 / s)


# ---------------------------------------------------------------------------
# sampled inner-bound points

def qin_points(problem: GaussianProblem, params: TestChannelParams) -> tuple[RdPoint, RdPoint]:
    """Both polymatroid corners of the inner bound with their distortions."""
    _independent(problem)
    d1, d2, d3 = test_channel_point(problem, params)
    rates = qin_corner_rates(problem, params)
    (a1, a2), (b1, b2) = rates["corner_c1"], rates["corner_c2"]
    clip = lambda v: max(v, 0.0)
    return (RdPoint(clip(a1), clip(a2), d1, d2, d3), RdPoint(clip(b1), clip(b2), d1, d2, d3))


def mix_points(p: RdPoint, q: RdPoint, w: float) -> RdPoint:
    """Timesharing between two operating points; every coordinate mixes linearly."""
    if not 0 <= w <= 1:
        raise ValueError("weight must lie in [0, 1]")
    vals = [w * a + (1 - w) * b for a, b in zip(p.as_tuple(), q.as_tuple())]
    return RdPoint(*vals)


def sample_test_channels(rng: np.random.Generator, n: int, lo: float = 1e-2, hi: float = 1e2,
                         p_absent: float = 0.1) -> list[TestChannelParams]:
    """Random test channels: log-uniform refinement noise, coarse layer drawn above it or absent."""
    out = []
    for _ in range(n):
        vals = []
        for _ in range(2):
            w = math.exp(rng.uniform(math.log(lo), math.log(hi)))
            if rng.random() < p_absent:
                u = ABSENT
            else:
                u = w * math.exp(rng.uniform(0.0, math.log(1e3)))
            vals += [u, w]
        out.append(TestChannelParams(*vals))
    return out


def d12_outer_boundary(problem: GaussianProblem, R: float) -> BoundaryPolyline:
    """Lower-left corner path of the outer ``(D1, D2)`` set inside ``[0, s]^2``."""
    f = d12_outer(problem, R)
    s, lo = problem.sigma_x2, f["individual_floor"]
    hi = min(f["sum_floor"] - lo, s)
    pts = [[lo, s], [lo, hi], [hi, lo], [s, lo]]
    return BoundaryPolyline(pts, ["floor", "sum", "sum", "floor"])
