"""Generic Gaussian oracle: exact joint covariances, log-det mutual informations,
Schur-complement MMSE and seeded Monte Carlo estimates.

Nothing here uses the closed forms it is meant to check; every quantity is
computed from a covariance matrix by linear algebra.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .gaussian_core import (
    ABSENT,
    GaussianProblem,
    TestChannelParams,
    qin_corner_rates,
    test_channel_point,
)
from .gaussian_regions import ceo_vertices

BASE_LABELS = ("X", "Y1", "Y2", "U1", "W1", "U2", "W2")
REG = 1e-12
COND_LIMIT = 1e14
DEFAULT_PARAMS = TestChannelParams(0.6, 1 / 3, 0.9, 1 / 3)


@dataclass
class JointCovariance:
    labels: tuple[str, ...]
    matrix: np.ndarray
    aliases: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        k = len(self.labels)
        if self.matrix.shape != (k, k):
            raise ValueError("matrix shape does not match labels")

    def index(self, names: Iterable[str]) -> list[int]:
        out = []
        for nm in names:
            nm = self.aliases.get(nm, nm)
            if nm not in self.labels:
                raise KeyError(f"unknown or absent variable {nm!r}")
            out.append(self.labels.index(nm))
        return out

    def resolve(self, names: Iterable[str]) -> list[str]:
        seen = []
        for nm in names:
            nm = self.aliases.get(nm, nm)
            if nm not in seen:
                seen.append(nm)
        return seen

    def has(self, name: str) -> bool:
        return self.aliases.get(name, name) in self.labels

    def sub(self, names: Sequence[str]) -> np.ndarray:
        idx = self.index(names)
        return self.matrix[np.ix_(idx, idx)]


def _components(problem: GaussianProblem, params: TestChannelParams):
    """Mixing matrix from independent standard normals to the named variables."""
    s, n1, n2, rho = problem.sigma_x2, problem.sigma_n1_2, problem.sigma_n2_2, problem.rho_n
    # latent order: X, N1, N2', T12, dT1, T22, dT2 (N2' makes N2 correlated with N1)
    cols = 7
    rows: dict[str, np.ndarray] = {}
    x = np.zeros(cols); x[0] = math.sqrt(s)
    nn1 = np.zeros(cols); nn1[1] = math.sqrt(n1)
    nn2 = np.zeros(cols)
    nn2[1] = rho * math.sqrt(n2)
    nn2[2] = math.sqrt(max(1 - rho * rho, 0.0) * n2)
    rows["X"] = x
    rows["Y1"] = x + nn1
    rows["Y2"] = x + nn2
    aliases = {}
    for i, (tu, tw, kw, ku) in ((1, (params.t11, params.t12, 3, 4)), (2, (params.t21, params.t22, 5, 6))):
        if tw == ABSENT:
            continue
        w = rows[f"Y{i}"].copy(); w[kw] = math.sqrt(tw)
        rows[f"W{i}"] = w
        if tu == ABSENT:
            continue
        if tu == tw:
            aliases[f"U{i}"] = f"W{i}"
            continue
        u = w.copy(); u[ku] = math.sqrt(tu - tw)
        rows[f"U{i}"] = u
    return rows, aliases


def joint_covariance(problem: GaussianProblem, params: TestChannelParams,
                     derived: bool = False) -> JointCovariance:
    """Exact covariance of ``(X, Y1, Y2, U1, W1, U2, W2)``; absent layers are omitted.

    With ``derived=True`` two extra rows hold ``S = E[X | Y1, Y2]`` and the
    residual ``theta = X - S``.
    """
    if params.t11 < params.t12 or params.t21 < params.t22:
        raise ValueError("need t_i1 >= t_i2")
    rows, aliases = _components(problem, params)
    labels = tuple(nm for nm in BASE_LABELS if nm in rows)
    A = np.vstack([rows[nm] for nm in labels])
    if derived:
        cyy = A[1:3] @ A[1:3].T
        cxy = A[0] @ A[1:3].T
        coef = np.linalg.lstsq(cyy, cxy, rcond=None)[0]
        srow = coef @ A[1:3]
        A = np.vstack([A, srow, A[0] - srow])
        labels = labels + ("S", "theta")
    M = A @ A.T
    return JointCovariance(labels, 0.5 * (M + M.T), aliases)


def _logdet(mat: np.ndarray) -> float:
    if mat.size == 0:
        return 0.0
    reg = mat + REG * np.eye(len(mat))
    if np.linalg.cond(reg) > COND_LIMIT:
        raise ValueError("singular conditional covariance")
    sign, val = np.linalg.slogdet(reg)
    if sign <= 0:
        raise ValueError("covariance not positive definite")
    return float(val)


def conditional_cov(cov: JointCovariance, target: Sequence[str], given: Sequence[str]) -> np.ndarray:
    """Schur complement ``Sigma_TT - Sigma_TG Sigma_GG^+ Sigma_GT``."""
    t_idx = cov.index(target)
    g_idx = cov.index(given)
    M = cov.matrix
    stt = M[np.ix_(t_idx, t_idx)]
    if not g_idx:
        return stt
    stg = M[np.ix_(t_idx, g_idx)]
    sgg = M[np.ix_(g_idx, g_idx)]
    sol = np.linalg.lstsq(sgg, stg.T, rcond=None)[0]
    out = stt - stg @ sol
    return 0.5 * (out + out.T)


def mmse(cov: JointCovariance, given: Sequence[str], target: str = "X") -> float:
    return float(conditional_cov(cov, [target], list(given))[0, 0])


def gaussian_mi(cov: JointCovariance, set_a: Sequence[str], set_b: Sequence[str],
                set_cond: Sequence[str] = ()) -> float:
    """I(A; B | C) in nats for jointly Gaussian variables."""
    c = cov.resolve(set_cond)
    a = [v for v in cov.resolve(set_a) if v not in c]
    b = [v for v in cov.resolve(set_b) if v not in c]
    if not a or not b:
        return 0.0
    if set(a) & set(b):
        raise ValueError("infinite mutual information: the two sets share a variable")
    la = _logdet(conditional_cov(cov, a, c))
    lb = _logdet(conditional_cov(cov, b, c))
    lab = _logdet(conditional_cov(cov, a + b, c))
    return 0.5 * (la + lb - lab)


# ---------------------------------------------------------------------------
# Monte Carlo

@dataclass
class SampleEstimate:
    n: int
    seed: int
    empirical_cov: JointCovariance
    shard_covs: list[JointCovariance]
    mmse_estimates: dict = field(default_factory=dict)
    mi_estimates: dict = field(default_factory=dict)

    def _batch(self, fn) -> tuple[float, float]:
        value = fn(self.empirical_cov)
        per = np.array([fn(c) for c in self.shard_covs])
        se = float(np.std(per, ddof=1) / math.sqrt(len(per))) if len(per) > 1 else math.nan
        return float(value), se

    def mmse(self, given: Sequence[str], target: str = "X") -> tuple[float, float]:
        return self._batch(lambda c: mmse(c, given, target))

    def mi(self, a, b, cond=()) -> tuple[float, float]:
        return self._batch(lambda c: gaussian_mi(c, a, b, cond))


def _shard_sizes(n: int, shards: int) -> list[int]:
    base, extra = divmod(n, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def _fsum_mean(mats: list[np.ndarray], weights: list[int]) -> np.ndarray:
    # compensated, order-independent merge of shard second moments
    total = float(sum(weights))
    shape = mats[0].shape
    out = np.empty(shape)
    for idx in np.ndindex(shape):
        out[idx] = math.fsum(m[idx] * w for m, w in zip(mats, weights)) / total
    return out


def sample_estimate(problem: GaussianProblem, params: TestChannelParams, n: int, seed: int,
                    shards: int = 50, chunk: int = 50_000) -> SampleEstimate:
    """Seeded sampling of the test-channel variables.

    Each of ``shards`` batches draws from its own PCG64 stream spawned off
    ``SeedSequence(seed)``; the zero-mean second moments of every batch give
    the batch-means standard errors.
    """
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    rows, aliases = _components(problem, params)
    labels = tuple(nm for nm in BASE_LABELS if nm in rows)
    A = np.vstack([rows[nm] for nm in labels])
    seqs = np.random.SeedSequence(seed).spawn(shards)
    sizes = _shard_sizes(n, shards)
    moments = []
    for ss, m in zip(seqs, sizes):
        rng = np.random.Generator(np.random.PCG64(ss))
        acc = np.zeros((len(labels), len(labels)))
        left = m
        while left > 0:
            k = min(chunk, left)
            z = rng.standard_normal((k, A.shape[1]))
            v = z @ A.T
            acc += v.T @ v
            left -= k
        moments.append(acc / m)
    pooled = _fsum_mean(moments, sizes)
    est = SampleEstimate(
        n=n,
        seed=seed,
        empirical_cov=JointCovariance(labels, pooled, dict(aliases)),
        shard_covs=[JointCovariance(labels, mm, dict(aliases)) for mm in moments],
    )
    for given in ((), ("U1",), ("U2",), ("W1", "W2"), ("Y1", "Y2")):
        if all(est.empirical_cov.has(g) for g in given):
            est.mmse_estimates[given] = est.mmse(given)
    for a, b in (("Y1", "W1"), ("Y2", "W2"), ("Y1", "U1"), ("Y2", "U2")):
        if est.empirical_cov.has(b):
            est.mi_estimates[(a, b)] = est.mi([a], [b])
    return est


# ---------------------------------------------------------------------------
# validation report

@dataclass
class CheckRecord:
    quantity: str
    closed_form: float
    analytic: float | None
    sampled: float | None
    se: float | None
    analytic_pass: bool | None
    sampled_pass: bool | None
    note: str = ""

    def status(self) -> str:
        if self.analytic_pass is None:
            return "n/a"
        ok = self.analytic_pass and (self.sampled_pass is not False)
        return "pass" if ok else "fail"


@dataclass
class ValidationReport:
    records: list[CheckRecord]

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.status() == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failures


def _mi_terms(problem, params):
    """Closed-form quantities paired with their generic-oracle definitions."""
    d1, d2, d3 = test_channel_point(problem, params)
    items = [
        ("D1", d1, ("mmse", ["U1"]), ("U1",)),
        ("D2", d2, ("mmse", ["U2"]), ("U2",)),
        ("D3", d3, ("mmse", ["W1", "W2"]), ("W1", "W2")),
    ]
    try:
        q = qin_corner_rates(problem, params)
    except ValueError:
        q = None
    if q is not None:
        A = [("mi", ["Y1"], ["U1"], []), ("mi", ["Y2"], ["U2"], [])]
        items += [
            ("corner_c1.R1", q["corner_c1"][0],
             ("sum", [A[0], ("mi", ["Y1"], ["W1"], ["U1", "U2", "W2"])]), ("W1",)),
            ("corner_c1.R2", q["corner_c1"][1],
             ("sum", [A[1], ("mi", ["Y2"], ["W2"], ["U1", "U2"])]), ("W2",)),
            ("corner_c2.R1", q["corner_c2"][0],
             ("sum", [A[0], ("mi", ["Y1"], ["W1"], ["U1", "U2"])]), ("W1",)),
            ("corner_c2.R2", q["corner_c2"][1],
             ("sum", [A[1], ("mi", ["Y2"], ["W2"], ["U1", "U2", "W1"])]), ("W2",)),
            ("sum_rate", q["sum_rate"],
             ("sum", A + [("mi", ["Y1", "Y2"], ["W1", "W2"], ["U1", "U2"])]), ("W1", "W2")),
        ]
    if params.t12 != ABSENT and params.t22 != ABSENT and params.t12 > 0 and params.t22 > 0:
        e1, e2 = ceo_vertices(problem, params.t12, params.t22)
        items += [
            ("E1.R1", e1[0], ("mi", ["Y1"], ["W1"], []), ("W1",)),
            ("E1.R2", e1[1], ("mi", ["Y2"], ["W2"], ["W1"]), ("W1", "W2")),
            ("E2.R1", e2[0], ("mi", ["Y1"], ["W1"], ["W2"]), ("W1", "W2")),
            ("E2.R2", e2[1], ("mi", ["Y2"], ["W2"], []), ("W2",)),
        ]
    return items


def _present(cov: JointCovariance, names) -> list[str]:
    return [nm for nm in names if cov.has(nm)]


def _evaluate(spec, cov: JointCovariance) -> float:
    kind = spec[0]
    if kind == "mmse":
        return mmse(cov, _present(cov, spec[1]))
    if kind == "mi":
        _, a, b, c = spec
        a, b, c = _present(cov, a), _present(cov, b), _present(cov, c)
        return gaussian_mi(cov, a, b, c) if a and b else 0.0
    if kind == "sum":
        return math.fsum(_evaluate(s, cov) for s in spec[1])
    raise ValueError(kind)


def validate(problem: GaussianProblem, params: TestChannelParams = DEFAULT_PARAMS, n: int = 1_000_000,
             seed: int = 7, tol: float = 3.0, analytic_tol: float = 1e-9) -> ValidationReport:
    """Compare closed forms with the analytic oracle (``analytic_tol``) and with
    Monte Carlo estimates (``tol`` standard errors)."""
    cov = joint_covariance(problem, params)
    est = sample_estimate(problem, params, n, seed)
    records = []
    for name, closed, spec, needs in _mi_terms(problem, params):
        if not all(cov.has(v) for v in needs):
            records.append(CheckRecord(name, closed, None, None, None, None, None, "n/a: absent layer"))
            continue
        analytic = _evaluate(spec, cov)
        sampled, se = est._batch(lambda c, sp=spec: _evaluate(sp, c))
        a_ok = abs(closed - analytic) <= analytic_tol * max(1.0, abs(closed))
        s_ok = abs(closed - sampled) <= tol * se
        records.append(CheckRecord(name, closed, analytic, sampled, se, a_ok, s_ok))
    return ValidationReport(records)
