"""Scalar closed forms for the scalar quadratic Gaussian setting.

The source is ``X ~ N(0, sigma_x2)`` observed through ``Y_i = X + N_i`` with
independent noises of variance ``sigma_n{i}_2``.  All rates are in nats.

An infinite test-channel variance (``math.inf``) encodes an absent
description; every reciprocal-sum formula treats it as a vanishing term.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

ABSENT = math.inf


class ClampWarning(UserWarning):
    """Issued when an input is moved into the studied distortion box."""


def _recip(v: float) -> float:
    if v == math.inf:
        return 0.0
    if v == 0.0:
        return math.inf
    return 1.0 / v


def _inv_sum(*terms: float) -> float:
    total = sum(terms)
    return 0.0 if total == math.inf else 1.0 / total


@dataclass(frozen=True)
class GaussianProblem:
    sigma_x2: float
    sigma_n1_2: float
    sigma_n2_2: float
    rho_n: float = 0.0

    def __post_init__(self):
        if not self.sigma_x2 > 0:
            raise ValueError("sigma_x2 must be positive")
        if self.sigma_n1_2 < 0 or self.sigma_n2_2 < 0:
            raise ValueError("noise variances must be nonnegative")
        if abs(self.rho_n) > 1:
            raise ValueError("rho_n must lie in [-1, 1]")

    def noise(self, i: int) -> float:
        if i == 1:
            return self.sigma_n1_2
        if i == 2:
            return self.sigma_n2_2
        raise ValueError(f"encoder index must be 1 or 2, got {i}")

    @property
    def symmetric(self) -> bool:
        return self.sigma_n1_2 == self.sigma_n2_2


@dataclass(frozen=True)
class DerivedConstants:
    d1_min: float
    d2_min: float
    d3_min: float
    d_x: float

    def d_min(self, i: int) -> float:
        return (self.d1_min, self.d2_min, self.d3_min)[i - 1]


@dataclass(frozen=True)
class TestChannelParams:
    """Test-channel noise variances ``(t11, t12, t21, t22)``.

    ``U_i = W_i + dT_i`` and ``W_i = Y_i + T_i2``, so ``t_i1 >= t_i2``.
    """
    __test__ = False  # not a pytest class

    t11: float
    t12: float
    t21: float
    t22: float

    def __post_init__(self):
        for name in ("t11", "t12", "t21", "t22"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.t11 < self.t12 or self.t21 < self.t22:
            raise ValueError("need t11 >= t12 and t21 >= t22")

    def u(self, i: int) -> float:
        return self.t11 if i == 1 else self.t21

    def w(self, i: int) -> float:
        return self.t12 if i == 1 else self.t22


@dataclass(frozen=True)
class RdPoint:
    r1: float
    r2: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        if not (self.r1 >= 0 and self.r2 >= 0):
            raise ValueError("rates must be nonnegative")
        if not (self.d1 >= 0 and self.d2 >= 0 and self.d3 >= 0):
            raise ValueError("distortions must be nonnegative")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.r1, self.r2, self.d1, self.d2, self.d3)

    @property
    def sum_rate(self) -> float:
        return self.r1 + self.r2


def derived_constants(problem: GaussianProblem) -> DerivedConstants:
    s, n1, n2, rho = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2, problem.rho_n
    d1 = _inv_sum(1 / s, _recip(n1))
    d2 = _inv_sum(1 / s, _recip(n2))
    if n1 == 0 or n2 == 0:
        d3 = 0.0
    elif rho == 0:
        d3 = _inv_sum(1 / s, 1 / n1, 1 / n2)
    elif abs(rho) == 1:
        if n1 != n2:
            raise ValueError("rho_n = +-1 with unequal noise variances is singular")
        # rho = 1: identical noises, one observation; rho = -1: noise cancels
        d3 = d1 if rho == 1 else 0.0
    else:
        prec = (n1 + n2 - 2 * rho * math.sqrt(n1 * n2)) / ((1 - rho ** 2) * n1 * n2)
        d3 = 1 / (1 / s + prec)
    return DerivedConstants(d1, d2, d3, s - d3)


def clamp_point(problem: GaussianProblem, point: RdPoint) -> tuple[RdPoint, bool]:
    """Move distortions above ``sigma_x2`` down to it and cap ``d3`` by the side distortions.

    Both moves leave region membership unchanged.  Distortions below the
    minimum are never raised, since that would turn infeasible points feasible.
    """
    s = problem.sigma_x2
    d1, d2 = min(point.d1, s), min(point.d2, s)
    d3 = min(point.d3, s, d1, d2)
    clamped = (d1, d2, d3) != (point.d1, point.d2, point.d3)
    if clamped:
        warnings.warn(f"distortions clamped to ({d1}, {d2}, {d3})", ClampWarning, stacklevel=3)
        point = replace(point, d1=d1, d2=d2, d3=d3)
    return point, clamped


def rate_noisy(problem: GaussianProblem, encoder_index: int, D: float) -> float:
    """Noisy-observation rate-distortion function R(D, sigma_N^2) of one encoder."""
    s = problem.sigma_x2
    n = problem.noise(encoder_index)
    d_min = _inv_sum(1 / s, _recip(n))
    if D > s:
        warnings.warn(f"D={D} exceeds sigma_x2; rate clamped to 0", ClampWarning, stacklevel=2)
        return 0.0
    # denominator D*s - s*n + D*n factored as (s + n)(D - d_min)
    denom = (s + n) * (D - d_min)
    if denom <= 0 or D <= d_min * (1 + 1e-14):
        raise ValueError(f"rate infinite: D={D} <= D_min={d_min}")
    return 0.5 * math.log(s * s / denom)


def distortion_rate_noisy(problem: GaussianProblem, encoder_index: int, R: float) -> float:
    if R < 0:
        raise ValueError("rate must be nonnegative")
    s = problem.sigma_x2
    n = problem.noise(encoder_index)
    # the min only removes round-off above s at R = 0
    return min((s * s * math.exp(-2 * R) + s * n) / (s + n), s)


def test_channel_point(problem: GaussianProblem, params: TestChannelParams) -> tuple[float, float, float]:
    """Best (equality) distortions ``(D1, D2, D3)`` of the two-layer test channels.

    Decoder ``i`` estimates from ``U_i``; decoder 3 from ``(W_1, W_2)``, since
    each ``U_i`` is a degraded copy of ``W_i``.
    """
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    d1 = _inv_sum(1 / s, _recip(n1 + params.t11))
    d2 = _inv_sum(1 / s, _recip(n2 + params.t21))
    d3 = _inv_sum(1 / s, _recip(n1 + params.t12), _recip(n2 + params.t22))
    return d1, d2, d3


test_channel_point.__test__ = False  # keep pytest from collecting the name


def _ratio(t: float, total: float) -> float:
    # t / (total) with t = inf mapping to 1
    return 1.0 if t == math.inf else t / total


def qin_corner_rates(problem: GaussianProblem, params: TestChannelParams) -> dict:
    """Corner rate pairs of the two polymatroid corners and their common sum rate.

    ``corner_c1`` decodes in the order ``(U1, U2) -> W2 -> W1``; ``corner_c2``
    swaps the roles of the two refinement layers.  Formulas are written in
    normalized quantities (precision of each channel output and the fraction
    of its variance that is test-channel noise) so absent layers reduce to
    their analytic limits.
    """
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    if params.t12 == 0 or params.t22 == 0:
        raise ValueError("infinite rate: a refinement layer with zero test-channel noise")
    a1 = _recip(s + n1 + params.t11)
    a2 = _recip(s + n2 + params.t21)
    b1 = _recip(s + n1 + params.t12)
    b2 = _recip(s + n2 + params.t22)
    tau1 = _ratio(params.t12, s + n1 + params.t12)
    tau2 = _ratio(params.t22, s + n2 + params.t22)
    s2 = s * s

    def half_log(num, den):
        return 0.5 * (math.log(num) - math.log(den))

    full = 1 - s2 * b1 * b2
    base = 1 - s2 * a1 * a2
    if base <= 0:
        raise ValueError("infinite rate: both coarse layers are noiseless")
    c1 = (half_log(full, tau1 * (1 - s2 * a1 * b2)),
          half_log(1 - s2 * a1 * b2, tau2 * base))
    c2 = (half_log(1 - s2 * b1 * a2, tau1 * base),
          half_log(full, tau2 * (1 - s2 * b1 * a2)))
    total = half_log(full, tau1 * tau2 * base)
    return {"corner_c1": c1, "corner_c2": c2, "sum_rate": total}


def d3_star_sumrate(problem: GaussianProblem, r_sum: float) -> float:
    """Minimum central distortion for sum rate ``r_sum`` (symmetric noises)."""
    if not problem.symmetric:
        raise ValueError("symmetric case only")
    if r_sum < 0:
        raise ValueError("rate must be nonnegative")
    s, n = problem.sigma_x2, problem.sigma_n1_2
    e1 = math.exp(-r_sum)
    e2 = e1 * e1
    num = (2 * s * s * n + s * n * n + 2 * s ** 3 * e2
           + 2 * s * s * e1 * math.sqrt(s * s * e2 + 2 * s * n + n * n))
    return num / (2 * s + n) ** 2


def d3_star_r1_inf(problem: GaussianProblem, r1: float) -> float:
    """Minimum central distortion when encoder 2 has unlimited rate."""
    if r1 < 0:
        raise ValueError("rate must be nonnegative")
    s, n1, n2 = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2
    num = s * s * n2 * n2 * math.exp(-2 * r1) + s * n1 * n2 * (s + n2)
    den = (s + n2) * (s * n1 + s * n2 + n1 * n2)
    if den == 0:
        return 0.0
    return num / den
