"""Bracketing root finder, unimodal maximizer, grids and 2-D lower-left frontiers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

ROOT_TOL = 1e-12
PRESCAN = 64


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("bracket needs lo < hi")


@dataclass
class BoundaryPolyline:
    points: np.ndarray
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if not self.labels:
            self.labels = [""] * len(self.points)
        if len(self.labels) != len(self.points):
            raise ValueError("one label per point")

    def __len__(self):
        return len(self.points)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]


def make_bracket(f: Callable[[float], float], lo: float, hi: float) -> Bracket:
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0 or f_hi == 0 or (f_lo < 0) != (f_hi < 0):
        return Bracket(lo, hi, f_lo, f_hi)
    raise ValueError(f"no sign change on [{lo}, {hi}]: f={f_lo}, {f_hi}")


def scalar_root(f: Callable[[float], float], bracket: Bracket | tuple[float, float],
                tol: float = ROOT_TOL) -> float:
    """Bisection root of ``f`` inside a sign-changing bracket."""
    if not isinstance(bracket, Bracket):
        bracket = make_bracket(f, *bracket)
    if bracket.f_lo == 0:
        return bracket.lo
    if bracket.f_hi == 0:
        return bracket.hi
    return optimize.bisect(f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                           maxiter=2000)


def _separated_maxima(vals: np.ndarray) -> bool:
    """True when the prescan shows two peaks with a genuine dip between them."""
    finite = np.where(np.isfinite(vals), vals, -np.inf)
    scale = max(1.0, float(np.max(np.abs(finite[np.isfinite(finite)]), initial=0.0)))
    eps = 1e-9 * scale
    # running maximum from the left then from the right; a dip below both is a valley
    left = np.maximum.accumulate(finite)
    right = np.maximum.accumulate(finite[::-1])[::-1]
    with np.errstate(invalid="ignore"):
        valley = np.where(np.isfinite(finite), np.minimum(left, right) - finite, 0.0)
    return bool(np.any(valley > eps))


def scalar_max(f: Callable[[float], float], lo: float, hi: float,
               tol: float = 1e-10) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    A 64-point prescan locates the peak cell, which is then refined with
    bounded Brent iterations.  Raises ``ValueError("not unimodal")`` if the
    prescan finds two separated maxima.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    xs = np.linspace(lo, hi, PRESCAN)
    vals = np.array([f(x) for x in xs], dtype=float)
    if _separated_maxima(vals):
        raise ValueError("not unimodal")
    vals_nan = np.where(np.isnan(vals), -np.inf, vals)
    k = int(np.argmax(vals_nan))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, PRESCAN - 1)]
    best_x, best_f = float(xs[k]), float(vals_nan[k])
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(a, b), method="bounded",
                                   options={"xatol": tol, "maxiter": 500})
    if np.isfinite(res.fun) and -res.fun >= best_f:
        best_x, best_f = float(res.x), float(-res.fun)
    for x in (a, b):
        fx = f(x)
        if fx > best_f:
            best_x, best_f = float(x), float(fx)
    return best_x, best_f


def log_grid(lo: float, hi: float, n: int = 512) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def pareto_minimal(points: np.ndarray) -> np.ndarray:
    """Points not weakly dominated by another point, sorted by x (then y)."""
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) == 0:
        raise ValueError("empty point set")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = []
    best_y = math.inf
    for p in pts:
        if p[1] < best_y:
            keep.append(p)
            best_y = p[1]
    return np.array(keep)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_frontier_2d(points, convex: bool = True, collinear_tol: float = 1e-12) -> BoundaryPolyline:
    """Lower-left frontier of a finite planar set.

    ``convex=False`` returns the Pareto staircase vertices; ``convex=True``
    keeps only the vertices of the lower-left convex hull, dropping
    collinear interior points.
    """
    stair = pareto_minimal(points)
    if not convex or len(stair) <= 2:
        return BoundaryPolyline(stair)
    hull: list[np.ndarray] = []
    for p in stair:
        while len(hull) >= 2:
            c = _cross(hull[-2], hull[-1], p)
            scale = max(1.0, abs(p[0]) + abs(p[1]))
            if c <= collinear_tol * scale * scale:
                hull.pop()
            else:
                break
        hull.append(p)
    return BoundaryPolyline(np.array(hull))


def frontier_distance(frontier: BoundaryPolyline, queries) -> np.ndarray:
    """Euclidean distance from each query point to the frontier polyline."""
    q = np.asarray(queries, dtype=float).reshape(-1, 2)
    pts = frontier.points
    if len(pts) == 1:
        return np.hypot(q[:, 0] - pts[0, 0], q[:, 1] - pts[0, 1])
    a, b = pts[:-1], pts[1:]
    ab = b - a
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    out = np.empty(len(q))
    for k, p in enumerate(q):
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        out[k] = np.min(np.hypot(*(proj - p).T))
    return out


def timeshare(x, y, w: float):
    """Convex combination ``w*x + (1-w)*y`` of two operating points."""
    if not 0 <= w <= 1:
        raise ValueError("weight must lie in [0, 1]")
    return w * np.asarray(x, dtype=float) + (1 - w) * np.asarray(y, dtype=float)


def rate_matched_mixtures(rates_a: Sequence[float], pts_a, rates_b: Sequence[float], pts_b,
                          target: float) -> np.ndarray:
    """All 2-point mixtures of ``a``- and ``b``-points whose mixed rate equals ``target``.

    Pair ``(i, j)`` contributes when ``target`` lies between the two rates; the
    mixing weight on ``a_i`` is ``(target - r_b)/(r_a - r_b)``.
    """
    ra = np.asarray(rates_a, dtype=float)[:, None]
    rb = np.asarray(rates_b, dtype=float)[None, :]
    pa = np.asarray(pts_a, dtype=float)
    pb = np.asarray(pts_b, dtype=float)
    diff = ra - rb
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(np.abs(diff) > 0, (target - rb) / diff, np.where(ra == target, 1.0, np.nan))
    ok = (w >= 0) & (w <= 1)
    ii, jj = np.nonzero(ok)
    ww = w[ii, jj][:, None]
    return ww * pa[ii] + (1 - ww) * pb[jj]
