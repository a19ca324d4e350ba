"""Finite-alphabet evaluation and heuristic search of the achievable regions.

Every evaluator builds the full joint pmf as a numpy tensor with one named
axis per variable, then reads off entropies of marginals.  Decoders default
to the posterior-weighted argmin of the distortion (lowest index on ties).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .gaussian_core import RdPoint

TENSOR_CAP = 10 ** 8
NORM_TOL = 1e-12
DEFAULT_CARD_CAP = 8


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True)
class DiscreteProblem:
    """Joint pmf ``P(x, y1, y2)`` and a distortion matrix ``d(x, xhat)``."""
    pmf: np.ndarray
    dist: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        dist = np.asarray(self.dist, dtype=float)
        if pmf.ndim != 3:
            raise ValueError("pmf must be a 3-d tensor P(x, y1, y2)")
        if np.any(pmf < 0) or abs(pmf.sum() - 1) > 1e-9:
            raise ValueError("pmf must be nonnegative and sum to 1")
        if dist.ndim != 2 or dist.shape[0] != pmf.shape[0]:
            raise ValueError("distortion matrix must have |X| rows")
        if not np.all(np.isfinite(dist)) or np.any(dist < 0):
            raise ValueError("distortions must be finite and nonnegative")
        object.__setattr__(self, "pmf", pmf / pmf.sum())
        object.__setattr__(self, "dist", dist)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        nx, n1, n2 = self.pmf.shape
        return nx, n1, n2, self.dist.shape[1]

    @property
    def d_max(self) -> float:
        px = self.pmf.sum(axis=(1, 2))
        return float(np.min(px @ self.dist))


@dataclass
class AuxChannels:
    """Encoder channels ``q_i[y_i, u_i, w_i] = P(u_i, w_i | y_i)`` and optional decoders.

    ``f1[u1]``, ``f2[u2]`` and ``f3[u1, w1, u2, w2]`` hold reconstruction
    indices; ``None`` means derive the optimal decoder.
    """
    q1: np.ndarray
    q2: np.ndarray
    f1: np.ndarray | None = None
    f2: np.ndarray | None = None
    f3: np.ndarray | None = None

    def __post_init__(self):
        self.q1 = _check_channel(self.q1, 3, "q1")
        self.q2 = _check_channel(self.q2, 3, "q2")

    @property
    def cards(self) -> tuple[int, int, int, int]:
        return self.q1.shape[1], self.q1.shape[2], self.q2.shape[1], self.q2.shape[2]


@dataclass(frozen=True)
class CommonPart:
    k: int
    f: np.ndarray
    g: np.ndarray


@dataclass
class AchievablePoint:
    corner1: RdPoint
    corner2: RdPoint
    sum_rate: float
    distortions: tuple[float, float, float]
    channels: AuxChannels
    objective: float | None = None
    evaluations: int = 0

    @property
    def rate_bounds(self) -> tuple[float, float, float]:
        """Individual and sum lower bounds of the contra-polymatroid rate region."""
        return self.corner1.r1, self.corner2.r2, self.sum_rate


def _check_channel(q, ndim, name):
    q = np.asarray(q, dtype=float)
    if q.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} axes")
    if np.any(q < 0):
        raise ValueError(f"{name} has negative entries")
    rows = q.reshape(q.shape[0], -1).sum(axis=1)
    if np.any(np.abs(rows - 1) > 1e-9):
        raise ValueError(f"{name} rows must sum to 1")
    return q


def _normalize_rows(q: np.ndarray, lead: int = 1) -> np.ndarray:
    """Normalize a conditional pmf whose first ``lead`` axes are the conditioning variables."""
    axes = tuple(range(lead, q.ndim))
    return q / q.sum(axis=axes, keepdims=True)


# ---------------------------------------------------------------------------
# joint tensors

def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


class JointPmf:
    """A joint pmf tensor whose axes carry variable names."""

    def __init__(self, tensor: np.ndarray, names: Sequence[str]):
        if tensor.ndim != len(names):
            raise ValueError("one name per axis")
        self.tensor = tensor
        self.names = tuple(names)
        self._cache: dict[frozenset, float] = {}

    def marginal(self, keep: Sequence[str]) -> np.ndarray:
        idx = [self.names.index(k) for k in keep]
        drop = tuple(i for i in range(len(self.names)) if i not in idx)
        m = self.tensor.sum(axis=drop)
        # reorder to the requested order
        kept_sorted = sorted(idx)
        perm = [kept_sorted.index(i) for i in idx]
        return np.transpose(m, perm)

    def H(self, names: Sequence[str]) -> float:
        key = frozenset(names)
        if not key:
            return 0.0
        if key not in self._cache:
            self._cache[key] = _entropy(self.marginal(sorted(key, key=self.names.index)))
        return self._cache[key]

    def I(self, a: Sequence[str], b: Sequence[str], c: Sequence[str] = ()) -> float:
        a, b, c = set(a), set(b), set(c)
        return self.H(a | c) + self.H(b | c) - self.H(a | b | c) - self.H(c)

    def decoder(self, given: Sequence[str], dist: np.ndarray, fixed: np.ndarray | None = None):
        """Distortion of the best (or supplied) decoder of X from ``given``."""
        pxv = self.marginal(["X", *given])
        nx = pxv.shape[0]
        flat = pxv.reshape(nx, -1)
        cost = flat.T @ dist  # [v, xhat]
        if fixed is None:
            dec = np.argmin(cost, axis=1)
        else:
            dec = np.asarray(fixed, dtype=int).reshape(-1)
            if dec.size != cost.shape[0]:
                raise ValueError("decoder table has the wrong size")
        d = float(cost[np.arange(len(dec)), dec].sum())
        vshape = pxv.shape[1:]
        return d, dec.reshape(vshape) if vshape else dec


def _check_size(shape):
    if math.prod(shape) > TENSOR_CAP:
        raise ValueError(f"joint tensor would have {math.prod(shape)} entries (cap {TENSOR_CAP})")


def _theorem1_joint(prob: DiscreteProblem, aux: AuxChannels) -> JointPmf:
    nx, n1, n2, _ = prob.shape
    if aux.q1.shape[0] != n1 or aux.q2.shape[0] != n2:
        raise ValueError("dimension mismatch between channels and observation alphabets")
    _check_size((nx, n1, n2) + aux.cards)
    t = np.einsum("abc,buv,cst->abcuvst", prob.pmf, aux.q1, aux.q2, optimize=True)
    return JointPmf(t, ("X", "Y1", "Y2", "U1", "W1", "U2", "W2"))


def theorem1_evaluate(prob: DiscreteProblem, aux: AuxChannels) -> AchievablePoint:
    """Both corner points, the sum rate and the distortions of one channel choice."""
    J = _theorem1_joint(prob, aux)
    iu1 = J.I(["Y1"], ["U1"])
    iu2 = J.I(["Y2"], ["U2"])
    r1_a = iu1 + J.I(["Y1"], ["W1"], ["U1", "U2", "W2"])
    r2_a = iu2 + J.I(["Y2"], ["W2"], ["U1", "U2"])
    r1_b = iu1 + J.I(["Y1"], ["W1"], ["U1", "U2"])
    r2_b = iu2 + J.I(["Y2"], ["W2"], ["U1", "U2", "W1"])
    total = iu1 + iu2 + J.I(["Y1", "Y2"], ["W1", "W2"], ["U1", "U2"])
    d1, f1 = J.decoder(["U1"], prob.dist, aux.f1)
    d2, f2 = J.decoder(["U2"], prob.dist, aux.f2)
    d3, f3 = J.decoder(["U1", "W1", "U2", "W2"], prob.dist, aux.f3)
    clip = lambda v: max(v, 0.0)
    c1 = RdPoint(clip(r1_a), clip(r2_a), d1, d2, d3)
    c2 = RdPoint(clip(r1_b), clip(r2_b), d1, d2, d3)
    decoded = replace(aux, f1=f1, f2=f2, f3=f3)
    return AchievablePoint(c1, c2, clip(total), (d1, d2, d3), decoded)


# ---------------------------------------------------------------------------
# common part

def common_part(joint) -> CommonPart:
    """Gacs-Korner common part of ``(Y1, Y2)`` from its joint pmf matrix.

    Letters with zero marginal probability get label ``-1``; all others are
    labelled ``0..k-1`` by connected component of the support graph.
    """
    P = np.asarray(joint, dtype=float)
    if P.ndim != 2:
        raise ValueError("joint must be a matrix P(y1, y2)")
    if np.any(P < 0) or not P.sum() > 0:
        raise ValueError("empty support")
    n1, n2 = P.shape
    r, c = np.nonzero(P > 0)
    graph = coo_matrix((np.ones(len(r)), (r, n1 + c)), shape=(n1 + n2, n1 + n2))
    _, comp = connected_components(graph, directed=False)
    live = np.concatenate([P.sum(axis=1) > 0, P.sum(axis=0) > 0])
    # relabel live components 0..k-1 in order of first appearance
    mapping: dict[int, int] = {}
    labels = np.full(n1 + n2, -1, dtype=int)
    for v in range(n1 + n2):
        if live[v]:
            labels[v] = mapping.setdefault(int(comp[v]), len(mapping))
    return CommonPart(len(mapping), labels[:n1], labels[n1:])


# ---------------------------------------------------------------------------
# two-layer scheme search

def default_cards(prob: DiscreteProblem, cap: int = DEFAULT_CARD_CAP) -> tuple[int, int, int, int]:
    _, n1, n2, _ = prob.shape
    u1, u2 = n1 + 4, n2 + 4
    w1, w2 = n1 * n1 + 4 * n1 + 3, n2 * n2 + 4 * n2 + 3
    return tuple(min(c, cap) for c in (u1, w1, u2, w2))


def _random_channel(rng, n_in, shape):
    q = rng.dirichlet(np.ones(math.prod(shape)), size=n_in)
    return q.reshape((n_in,) + tuple(shape))


def _perturb(rng, q, scale):
    """Multiplicative log-normal perturbation of one conditional row."""
    q = q.copy()
    row = int(rng.integers(q.shape[0]))
    r = q[row] * np.exp(scale * rng.standard_normal(q[row].shape))
    r = np.maximum(r, 1e-300)
    q[row] = r / r.sum()
    return q


def embed_channels(aux: AuxChannels, cards: tuple[int, int, int, int]) -> AuxChannels:
    """Zero-pad channels into larger auxiliary alphabets (same induced joint)."""
    u1, w1, u2, w2 = cards
    if any(a > b for a, b in zip(aux.cards, cards)):
        raise ValueError("target cardinalities must not be smaller")
    q1 = np.zeros((aux.q1.shape[0], u1, w1))
    q1[:, : aux.q1.shape[1], : aux.q1.shape[2]] = aux.q1
    q2 = np.zeros((aux.q2.shape[0], u2, w2))
    q2[:, : aux.q2.shape[1], : aux.q2.shape[2]] = aux.q2
    return AuxChannels(q1, q2)


@dataclass
class _Scalarizer:
    weights: np.ndarray
    caps: dict
    penalty: float

    def score(self, pt: AchievablePoint) -> tuple[float, bool]:
        v = np.array(pt.corner1.as_tuple())
        obj = float(self.weights @ v)
        excess = 0.0
        for key, cap in self.caps.items():
            d = {"d1": pt.distortions[0], "d2": pt.distortions[1], "d3": pt.distortions[2]}[key]
            excess += max(0.0, d - cap)
        return obj + self.penalty * excess, excess <= 1e-12


def theorem1_optimize(prob: DiscreteProblem, cards: tuple[int, int, int, int] | None = None,
                      weights: Sequence[float] = (1, 1, 1, 1, 1), budget: int = 10_000, seed: int = 0,
                      constraints: dict | None = None, restarts: int | None = None,
                      init: AuxChannels | None = None, penalty: float = 50.0) -> AchievablePoint:
    """Heuristic minimization of ``weights . (R1, R2, D1, D2, D3)`` at the first corner.

    ``constraints`` optionally caps distortions (keys ``d1``, ``d2``, ``d3``)
    through a penalty; the best point meeting the caps is returned when one
    was found. ``budget`` counts evaluations.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    cards = tuple(cards) if cards is not None else default_cards(prob)
    if len(cards) != 4 or min(cards) < 1:
        raise ValueError("cards must be four positive integers")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (5,):
        raise ValueError("weights must have five entries")
    scal = _Scalarizer(weights, dict(constraints or {}), penalty)
    _, n1, n2, _ = prob.shape
    u1, w1, u2, w2 = cards
    restarts = restarts or max(1, min(20, budget // 500))
    per = budget // restarts
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    used = 0

    def evaluate(q1, q2):
        nonlocal used
        used += 1
        pt = theorem1_evaluate(prob, AuxChannels(q1, q2))
        return pt, *scal.score(pt)

    best = None  # (feasible, score, point)

    def consider(pt, s, feas):
        nonlocal best
        key = (not feas, s)
        if best is None or key < (not best[0], best[1]):
            best = (feas, s, pt)

    # the constant channel (no information) is always a candidate
    q1c = np.zeros((n1, u1, w1)); q1c[:, 0, 0] = 1
    q2c = np.zeros((n2, u2, w2)); q2c[:, 0, 0] = 1
    consider(*evaluate(q1c, q2c))

    for k, ss in enumerate(seqs):
        rng = np.random.default_rng(ss)
        if k == 0 and init is not None:
            start = embed_channels(init, cards)
            q1, q2 = start.q1, start.q2
        else:
            q1, q2 = _random_channel(rng, n1, (u1, w1)), _random_channel(rng, n2, (u2, w2))
        pt, s, feas = evaluate(q1, q2)
        consider(pt, s, feas)
        steps = max(per - 1, 1)
        for step in range(steps):
            scale = 0.5 * (0.01 / 0.5) ** (step / max(steps - 1, 1))
            if rng.random() < 0.5:
                c1, c2 = _perturb(rng, q1, scale), q2
            else:
                c1, c2 = q1, _perturb(rng, q2, scale)
            cand, cs, cfeas = evaluate(c1, c2)
            if cs <= s:
                q1, q2, pt, s, feas = c1, c2, cand, cs, cfeas
                consider(pt, s, feas)
            if used >= budget:
                break
        if used >= budget:
            break

    feas, s, pt = best
    pt.objective = float(weights @ np.array(pt.corner1.as_tuple()))
    pt.evaluations = used
    return pt


# ---------------------------------------------------------------------------
# one encoder, decoder 3 also sees Y2

def _cor1_joint(prob: DiscreteProblem, q: np.ndarray) -> JointPmf:
    _check_size(prob.pmf.shape + q.shape[1:])
    t = np.einsum("abc,buw->abcuw", prob.pmf, q, optimize=True)
    return JointPmf(t, ("X", "Y1", "Y2", "U1", "W1"))


def corollary1_evaluate(prob: DiscreteProblem, q: np.ndarray) -> tuple[float, float, float]:
    """``(rate, D1, D3)`` for ``q[y1, u1, w1]``: rate ``I(Y1;U1) + I(Y1;W1|Y2,U1)``."""
    q = _check_channel(q, 3, "q")
    J = _cor1_joint(prob, q)
    rate = J.I(["Y1"], ["U1"]) + J.I(["Y1"], ["W1"], ["Y2", "U1"])
    d1, _ = J.decoder(["U1"], prob.dist)
    d3, _ = J.decoder(["Y2", "U1", "W1"], prob.dist)
    return max(rate, 0.0), d1, d3


def corollary1_min_rate(prob: DiscreteProblem, d1_max: float, d3_max: float,
                        cards: tuple[int, int] | None = None, budget: int = 10_000, seed: int = 0,
                        penalty: float = 50.0) -> float:
    """Heuristic minimum rate of encoder 1 for side caps ``d1_max`` and ``d3_max``."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    _, n1, _, _ = prob.shape
    if cards is None:
        cards = (min(n1 + 2, DEFAULT_CARD_CAP), min((n1 + 1) ** 2, DEFAULT_CARD_CAP))
    u, w = cards
    eye = np.zeros((n1, n1, n1))
    eye[np.arange(n1), np.arange(n1), np.arange(n1)] = 1
    _, d1_best, d3_best = corollary1_evaluate(prob, eye)
    if d1_max < d1_best - 1e-12 or d3_max < d3_best - 1e-12:
        raise ValueError(f"infeasible constraints: best achievable D1={d1_best}, D3={d3_best}")

    def score(q):
        r, d1, d3 = corollary1_evaluate(prob, q)
        ex = max(0.0, d1 - d1_max) + max(0.0, d3 - d3_max)
        return r + penalty * ex, ex <= 1e-12, r

    best = math.inf
    const = np.zeros((n1, u, w)); const[:, 0, 0] = 1
    s, feas, r = score(const)
    if feas:
        best = r
    if u >= n1 and w >= n1:
        # the identity channel is feasible by the pre-check
        ident = np.zeros((n1, u, w)); ident[np.arange(n1), np.arange(n1), np.arange(n1)] = 1
        best = min(best, score(ident)[2])
    restarts = max(1, min(20, budget // 500))
    per = budget // restarts
    for ss in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(ss)
        q = _random_channel(rng, n1, (u, w))
        s, feas, r = score(q)
        if feas:
            best = min(best, r)
        for step in range(max(per - 1, 1)):
            scale = 0.5 * (0.02) ** (step / max(per - 2, 1))
            c = _perturb(rng, q, scale)
            cs, cfeas, cr = score(c)
            if cs <= s:
                q, s = c, cs
                if cfeas:
                    best = min(best, cr)
    return best


# ---------------------------------------------------------------------------
# centralized (identical-input) evaluator

def theorem3_evaluate(pxy, dist, aux, restrict_cstar: bool = False) -> dict:
    """Rate bounds and distortions for reconstructions ``aux[y, x0, x1, x2, x3]``.

    ``x1..x3`` index the reconstruction alphabet directly.  With
    ``restrict_cstar`` the result also reports whether the choice lies in the
    restricted class (constant ``x0``, independent ``x1`` and ``x2``).
    """
    pxy = np.asarray(pxy, dtype=float)
    dist = np.asarray(dist, dtype=float)
    aux = np.asarray(aux, dtype=float)
    if pxy.ndim != 2 or aux.ndim != 5 or aux.shape[0] != pxy.shape[1]:
        raise ValueError("dimension mismatch")
    if any(aux.shape[i] != dist.shape[1] for i in (2, 3, 4)):
        raise ValueError("reconstruction alphabets must match the distortion matrix")
    aux = _check_channel(aux, 5, "aux")
    _check_size(pxy.shape + aux.shape[1:])
    t = np.einsum("xy,yabcd->xyabcd", pxy, aux, optimize=True)
    J = JointPmf(t, ("X", "Y", "X0", "X1", "X2", "X3"))
    out = {
        "r1": max(J.I(["Y"], ["X0", "X1"]), 0.0),
        "r2": max(J.I(["Y"], ["X0", "X2"]), 0.0),
        "sum": max(2 * J.I(["Y"], ["X0"]) + J.I(["X1"], ["X2"], ["X0"])
                   + J.I(["Y"], ["X1", "X2", "X3"], ["X0"]), 0.0),
    }
    for i in (1, 2, 3):
        m = J.marginal(["X", f"X{i}"])
        out[f"d{i}"] = float(np.sum(m * dist))
    if restrict_cstar:
        out["in_cstar"] = bool(J.H(["X0"]) <= 1e-12 and abs(J.I(["X1"], ["X2"])) <= 1e-12)
    return out


# ---------------------------------------------------------------------------
# common-part superposition evaluator

@dataclass
class ZLayer:
    """``p012[z, z0, z1, z2]`` and ``p3[z, z0, z1, z2, z3]`` conditional pmfs."""
    p012: np.ndarray
    p3: np.ndarray

    def __post_init__(self):
        self.p012 = _check_channel(self.p012, 4, "p012")
        self.p3 = np.asarray(self.p3, dtype=float)
        if self.p3.ndim != 5 or self.p3.shape[:4] != self.p012.shape:
            raise ValueError("p3 must be indexed by (z, z0, z1, z2, z3)")
        if np.any(np.abs(self.p3.sum(axis=4) - 1) > 1e-9):
            raise ValueError("p3 rows must sum to 1")


@dataclass
class UWLayer:
    """``pu1[y1, z0, z1, u1]``, ``pu2[y2, z0, z2, u2]``,
    ``pw1[y1, z0, z1, z2, z3, u1, w1]``, ``pw2[y2, z0, z1, z2, z3, u2, w2]``."""
    pu1: np.ndarray
    pu2: np.ndarray
    pw1: np.ndarray
    pw2: np.ndarray
    f1: np.ndarray | None = None
    f2: np.ndarray | None = None
    f3: np.ndarray | None = None

    def __post_init__(self):
        for name, nd, lead in (("pu1", 4, 3), ("pu2", 4, 3), ("pw1", 7, 6), ("pw2", 7, 6)):
            q = np.asarray(getattr(self, name), dtype=float)
            if q.ndim != nd or np.any(q < 0) or np.any(np.abs(q.sum(axis=-1) - 1) > 1e-9):
                raise ValueError(f"{name} must be a conditional pmf with {nd} axes")
            setattr(self, name, q)


def theorem4_evaluate(prob: DiscreteProblem, common: CommonPart, aux_z: ZLayer, aux_uw: UWLayer) -> dict:
    """Rate bounds and distortions of the common-part superposition scheme.

    The sum bound is the chain-rule form that reduces to both special cases;
    ``sum_as_printed`` carries the alternative expression for comparison.
    Side decoders see the decodable common layers, i.e. ``(Z0, Z1, U1)``.
    """
    nx, n1, n2, _ = prob.shape
    k = common.k
    if len(common.f) != n1 or len(common.g) != n2:
        raise ValueError("common part does not match the observation alphabets")
    zmap = np.asarray(common.f)
    p = prob.pmf.copy()
    if np.any(zmap[p.sum(axis=(0, 2)) > 0] < 0):
        raise ValueError("common part leaves a live letter unlabelled")
    _, a0, a1, a2 = aux_z.p012.shape
    a3 = aux_z.p3.shape[4]
    cu1, cu2 = aux_uw.pu1.shape[3], aux_uw.pu2.shape[3]
    cw1, cw2 = aux_uw.pw1.shape[6], aux_uw.pw2.shape[6]
    if aux_z.p012.shape[0] != k:
        raise ValueError("Z layer must be indexed by the common-part value")
    if aux_uw.pu1.shape[:3] != (n1, a0, a1) or aux_uw.pu2.shape[:3] != (n2, a0, a2):
        raise ValueError("U channels have the wrong conditioning shape")
    if aux_uw.pw1.shape[:6] != (n1, a0, a1, a2, a3, cu1) or aux_uw.pw2.shape[:6] != (n2, a0, a1, a2, a3, cu2):
        raise ValueError("W channels have the wrong conditioning shape")
    _check_size((nx, n1, n2, k, a0, a1, a2, a3, cu1, cw1, cu2, cw2))
    # P(x, y1, y2, z) with z = f(y1)
    zind = np.zeros((n1, k))
    live = zmap >= 0
    zind[np.arange(n1)[live], zmap[live]] = 1
    pxyz = np.einsum("abc,bz->abcz", p, zind)
    t = np.einsum("abcz,zpqr,zpqrs,bpqu,cprv,bpqrsuw,cpqrsvx->abczpqrsuwvx",
                  pxyz, aux_z.p012, aux_z.p3, aux_uw.pu1, aux_uw.pu2, aux_uw.pw1, aux_uw.pw2,
                  optimize=True)
    J = JointPmf(t, ("X", "Y1", "Y2", "Z", "Z0", "Z1", "Z2", "Z3", "U1", "W1", "U2", "W2"))
    zall = ["Z0", "Z1", "Z2", "Z3"]
    a_1 = J.I(["Y1"], ["Z0", "Z1", "U1"])
    a_2 = J.I(["Y2"], ["Z0", "Z2", "U2"])
    r1 = a_1 + J.I(["Y1"], ["W1"], zall + ["U1", "U2", "W2"])
    r2 = a_2 + J.I(["Y2"], ["W2"], zall + ["U1", "U2", "W1"])
    tail = J.I(["Y1", "Y2"], ["W1", "W2"], zall + ["U1", "U2"])
    total = (a_1 + a_2 + J.I(["Z1"], ["Z2"], ["Z", "Z0"]) + J.I(["Z"], ["Z3"], ["Z0", "Z1", "Z2"]) + tail)
    printed = a_1 + a_2 + J.I(["Z1"], ["Z2"], ["Z0"]) + J.I(["Z"], ["Z1", "Z2", "Z3"], ["Z0"]) + tail
    d1, _ = J.decoder(["Z0", "Z1", "U1"], prob.dist, aux_uw.f1)
    d2, _ = J.decoder(["Z0", "Z2", "U2"], prob.dist, aux_uw.f2)
    d3, _ = J.decoder(zall + ["U1", "W1", "U2", "W2"], prob.dist, aux_uw.f3)
    return {"r1": max(r1, 0.0), "r2": max(r2, 0.0), "sum": max(total, 0.0),
            "sum_as_printed": max(printed, 0.0), "d1": d1, "d2": d2, "d3": d3}


def trivial_zlayer(k: int) -> ZLayer:
    return ZLayer(np.ones((k, 1, 1, 1)), np.ones((k, 1, 1, 1, 1)))


def lift_theorem1(aux: AuxChannels) -> UWLayer:
    """Two-layer channels written as common-part layers with a constant Z layer."""
    q1, q2 = aux.q1, aux.q2
    pu1 = q1.sum(axis=2)
    pu2 = q2.sum(axis=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        w1 = np.where(pu1[..., None] > 0, q1 / pu1[..., None], 1.0 / q1.shape[2])
        w2 = np.where(pu2[..., None] > 0, q2 / pu2[..., None], 1.0 / q2.shape[2])
    n1, cu1, cw1 = q1.shape
    n2, cu2, cw2 = q2.shape
    return UWLayer(
        pu1.reshape(n1, 1, 1, cu1),
        pu2.reshape(n2, 1, 1, cu2),
        w1.reshape(n1, 1, 1, 1, 1, cu1, cw1),
        w2.reshape(n2, 1, 1, 1, 1, cu2, cw2),
    )
