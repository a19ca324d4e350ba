"""Command-line front end.

Tabular results go out as CSV (header row, 12 significant digits) and
everything else as JSON.  Rates are nats internally; ``--units bits``
converts rate inputs and outputs at the boundary only.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import discrete_inner as di
from . import gaussian_regions as gr
from . import oracle_mc
from .gaussian_core import GaussianProblem, RdPoint, TestChannelParams, derived_constants

VERSION = "0.1.0"
LN2 = math.log(2)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    sigma_x2: float = 1.0
    sigma_n1_2: float = 1.0
    sigma_n2_2: float = 1.0
    rho_n: float = 0.0
    units: str = "nats"
    seed: int = 0
    out: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def problem(self) -> GaussianProblem:
        return GaussianProblem(self.sigma_x2, self.sigma_n1_2, self.sigma_n2_2, self.rho_n)

    @property
    def rate_scale(self) -> float:
        """Multiplier from nats to output units."""
        return 1 / LN2 if self.units == "bits" else 1.0


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return float(f"{v:.12g}")
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def dump_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# robustdsc {VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def emit(cfg: RunConfig, text: str, name: str | None = None):
    if cfg.out and name is not None:
        path = Path(cfg.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)
    elif cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# file formats

def _tensor(obj, key: str) -> np.ndarray:
    try:
        shape = obj["shape"]
        flat = obj[key]
    except (KeyError, TypeError):
        raise UsageError(f"expected an object with 'shape' and '{key}'")
    arr = np.asarray(flat, dtype=float)
    if arr.size != math.prod(shape):
        raise UsageError("flat array length does not match shape")
    return arr.reshape(shape)


def load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {path}: {exc}")


def load_problem(pmf_path: str, dist_path: str | None) -> di.DiscreteProblem:
    pmf = _tensor(load_json(pmf_path), "p")
    if dist_path is None:
        k = pmf.shape[0]
        dist = 1 - np.eye(k)
    else:
        dist = _tensor(load_json(dist_path), "d")
    return di.DiscreteProblem(pmf, dist)


def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}")
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated values, got {len(vals)}")
    return vals


# ---------------------------------------------------------------------------
# commands

def cmd_constants(cfg, args):
    k = derived_constants(cfg.problem)
    emit(cfg, dump_json({"d1_min": k.d1_min, "d2_min": k.d2_min, "d3_min": k.d3_min, "d_x": k.d_x}))


def _witness_json(w, scale):
    if w is None:
        return None
    if isinstance(w, gr.OuterWitness):
        p = w.params
        return {"r11": p.r11 * scale, "r12": p.r12 * scale, "r21": p.r21 * scale, "r22": p.r22 * scale,
                "zeta": w.zeta, "lambda": w.lambda_val * scale, "sigma_m2_hat": w.sigma_m2_hat}
    if isinstance(w, tuple):
        return {"t1": w[0], "t2": w[1]}
    return w


def cmd_member(cfg, args):
    prob = cfg.problem
    r1, r2, d1, d2, d3 = _floats(args.point, 5)
    r1, r2 = r1 / cfg.rate_scale, r2 / cfg.rate_scale
    region = args.region
    if region == "omega":
        res = gr.omega_margin(prob, r1, r2)
        out = {"region": region, "contains": res >= -1e-9, "margin": res * cfg.rate_scale}
        emit(cfg, dump_json(out))
        return
    point = RdPoint(r1, r2, d1, d2, d3)
    if region == "ippr":
        res = gr.ippr_contains(prob, point)
    elif region == "ceo":
        res = gr.ceo_contains(prob, r1, r2, d3)
    elif region == "qout":
        res = gr.qout_contains(prob, point)
    elif region == "md":
        res = gr.noisy_md_contains(prob, point)
    elif region == "partial":
        if args.item is None:
            raise UsageError("--item is required for the partial region")
        res = gr.partial_char_contains(prob, point, args.item)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(region)
    # margins of the rate-slack regions are in rate units
    m_scale = 1.0 if region == "ippr" else cfg.rate_scale
    out = {"region": region, "contains": res.contains, "margin": res.margin * m_scale,
           "witness": _witness_json(res.witness, cfg.rate_scale)}
    emit(cfg, dump_json(out))


def _rate_rows(poly, scale):
    return [(lab, x * scale, y * scale, (x + y) * scale) for (x, y), lab in zip(poly.points, poly.labels)]


def cmd_boundary(cfg, args):
    prob = cfg.problem
    if args.region == "ceo":
        if args.d3 is None:
            raise UsageError("--d3 is required for the ceo boundary")
        poly = gr.ceo_boundary(prob, args.d3, args.samples)
        emit(cfg, dump_csv(["label", "r1", "r2", "sum_rate"], _rate_rows(poly, cfg.rate_scale)))
        return
    if args.rate is None:
        raise UsageError("--rate is required for d12 boundaries")
    rate = args.rate / cfg.rate_scale
    if args.region == "d12in":
        poly = gr.d12_inner_curve(prob, rate, args.samples)
    else:
        poly = gr.d12_outer_boundary(prob, rate)
    rows = [(lab, x, y) for (x, y), lab in zip(poly.points, poly.labels)]
    emit(cfg, dump_csv(["label", "d1", "d2"], rows))


def cmd_figure(cfg, args):
    prob = cfg.problem
    if args.name in ("fig2", "fig3"):
        d3 = 0.4 if args.d3 is None else args.d3
        ceo = gr.ceo_boundary(prob, d3, args.samples)
        if args.name == "fig3":
            text = dump_csv(["label", "r1", "r2", "sum_rate"], _rate_rows(ceo, cfg.rate_scale))
        else:
            ippr = gr.ippr_boundary(prob, d3, args.samples)
            rows = [("ippr",) + r[1:] for r in _rate_rows(ippr, cfg.rate_scale)]
            rows += [("ceo",) + r[1:] for r in _rate_rows(ceo, cfg.rate_scale)]
            text = dump_csv(["curve", "r1", "r2", "sum_rate"], rows)
    else:
        rate = (0.5 if args.rate is None else args.rate) / cfg.rate_scale
        inner = gr.d12_inner_curve(prob, rate, args.samples)
        outer = gr.d12_outer_boundary(prob, rate)
        rows = [("inner", x, y) for x, y in inner.points] + [("outer", x, y) for x, y in outer.points]
        text = dump_csv(["curve", "d1", "d2"], rows)
    emit(cfg, text, f"{args.name}.csv")


def _point_json(pt: RdPoint, scale):
    return {"r1": pt.r1 * scale, "r2": pt.r2 * scale, "d1": pt.d1, "d2": pt.d2, "d3": pt.d3}


def _achievable_json(ap: di.AchievablePoint, scale):
    return {
        "corner1": _point_json(ap.corner1, scale),
        "corner2": _point_json(ap.corner2, scale),
        "sum_rate": ap.sum_rate * scale,
        "distortions": list(ap.distortions),
        "q1": {"shape": list(ap.channels.q1.shape), "p": ap.channels.q1.ravel()},
        "q2": {"shape": list(ap.channels.q2.shape), "p": ap.channels.q2.ravel()},
        "evaluations": ap.evaluations,
    }


def _caps(args):
    caps = {}
    for key in ("d1", "d2", "d3"):
        v = getattr(args, f"{key}_max", None)
        if v is not None:
            caps[key] = v
    return caps


def cmd_discrete(cfg, args):
    scale = cfg.rate_scale
    mode = args.mode
    if mode == "theorem3":
        pxy = _tensor(load_json(args.pmf), "p")
        dist = _tensor(load_json(args.dist), "d") if args.dist else 1 - np.eye(pxy.shape[0])
        if args.aux is None:
            raise UsageError("--aux is required")
        aux = _tensor(load_json(args.aux), "p")
        out = di.theorem3_evaluate(pxy, dist, aux, restrict_cstar=args.cstar)
        for k in ("r1", "r2", "sum"):
            out[k] *= scale
        emit(cfg, dump_json(out))
        return
    prob = load_problem(args.pmf, args.dist)
    if mode == "optimize":
        cards = tuple(int(c) for c in _floats(args.cards, 4)) if args.cards else None
        weights = _floats(args.weights, 5)
        ap = di.theorem1_optimize(prob, cards, weights, args.budget, cfg.seed, constraints=_caps(args))
        emit(cfg, dump_json(_achievable_json(ap, scale)))
    elif mode == "evaluate":
        if args.aux is None:
            raise UsageError("--aux is required")
        obj = load_json(args.aux)
        aux = di.AuxChannels(_tensor(obj.get("q1"), "p"), _tensor(obj.get("q2"), "p"))
        emit(cfg, dump_json(_achievable_json(di.theorem1_evaluate(prob, aux), scale)))
    elif mode == "corollary1":
        if args.d1_max is None or args.d3_max is None:
            raise UsageError("--d1-max and --d3-max are required")
        cards = tuple(int(c) for c in _floats(args.cards, 2)) if args.cards else None
        r = di.corollary1_min_rate(prob, args.d1_max, args.d3_max, cards, args.budget, cfg.seed)
        emit(cfg, dump_json({"min_rate": r * scale}))
    elif mode == "theorem4":
        if args.aux is None:
            raise UsageError("--aux is required")
        obj = load_json(args.aux)
        cp = di.common_part(prob.pmf.sum(axis=0))
        zl = di.ZLayer(_tensor(obj.get("p012"), "p"), _tensor(obj.get("p3"), "p"))
        uw = di.UWLayer(*(_tensor(obj.get(k), "p") for k in ("pu1", "pu2", "pw1", "pw2")))
        out = di.theorem4_evaluate(prob, cp, zl, uw)
        for k in ("r1", "r2", "sum", "sum_as_printed"):
            out[k] *= scale
        emit(cfg, dump_json(out))


def cmd_common_part(cfg, args):
    obj = load_json(args.pmf)
    arr = _tensor(obj, "p")
    joint = arr.sum(axis=0) if arr.ndim == 3 else arr
    cp = di.common_part(joint)
    emit(cfg, dump_json({"k": cp.k, "f": cp.f, "g": cp.g}))


def _parse_tol(text: str) -> float:
    t = text.strip().lower()
    if t.endswith("sigma"):
        t = t[: -len("sigma")]
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"cannot parse tolerance {text!r}")


def cmd_validate(cfg, args):
    params = TestChannelParams(*_floats(args.params, 4)) if args.params else oracle_mc.DEFAULT_PARAMS
    rep = oracle_mc.validate(cfg.problem, params, args.n, cfg.seed, _parse_tol(args.tol))
    records = []
    for r in rep.records:
        records.append({"quantity": r.quantity, "status": r.status(), "closed_form": r.closed_form,
                        "analytic": r.analytic, "sampled": r.sampled, "se": r.se, "note": r.note})
    emit(cfg, dump_json({"n": args.n, "seed": cfg.seed, "failures": len(rep.failures), "records": records}))


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(json.dumps({"error": "usage", "message": message}) + "\n")
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sigma-x2", type=float)
    common.add_argument("--sigma-n1", type=float, dest="sigma_n1_2", help="noise variance at encoder 1")
    common.add_argument("--sigma-n2", type=float, dest="sigma_n2_2", help="noise variance at encoder 2")
    common.add_argument("--rho-n", type=float)
    common.add_argument("--config", help="JSON file with problem parameters")
    common.add_argument("--units", choices=["nats", "bits"])
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (directory for figure)")

    p = _Parser(prog="robustdsc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("constants", parents=[common])

    m = sub.add_parser("member", parents=[common])
    m.add_argument("--region", required=True, choices=["ippr", "ceo", "qout", "md", "omega", "partial"])
    m.add_argument("--point", required=True, help="R1,R2,D1,D2,D3")
    m.add_argument("--item", type=int, choices=[1, 2, 3])

    b = sub.add_parser("boundary", parents=[common])
    b.add_argument("--region", required=True, choices=["ceo", "d12in", "d12out"])
    b.add_argument("--d3", type=float)
    b.add_argument("--rate", type=float)
    b.add_argument("--samples", type=int, default=300)

    f = sub.add_parser("figure", parents=[common])
    f.add_argument("name", choices=["fig2", "fig3", "fig4"])
    f.add_argument("--d3", type=float)
    f.add_argument("--rate", type=float)
    f.add_argument("--samples", type=int, default=300)

    d = sub.add_parser("discrete", parents=[common])
    d.add_argument("mode", choices=["optimize", "evaluate", "corollary1", "theorem3", "theorem4"])
    d.add_argument("--pmf", required=True)
    d.add_argument("--dist")
    d.add_argument("--aux")
    d.add_argument("--cards")
    d.add_argument("--weights", default="1,1,1,1,1")
    d.add_argument("--budget", type=int, default=10_000)
    d.add_argument("--d1-max", type=float)
    d.add_argument("--d2-max", type=float)
    d.add_argument("--d3-max", type=float)
    d.add_argument("--cstar", action="store_true")

    c = sub.add_parser("common-part", parents=[common])
    c.add_argument("--pmf", required=True)

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("--n", type=int, default=1_000_000)
    v.add_argument("--tol", default="3sigma")
    v.add_argument("--params", help="t11,t12,t21,t22")
    return p


PROBLEM_KEYS = ("sigma_x2", "sigma_n1_2", "sigma_n2_2", "rho_n", "units", "seed", "out")


def make_config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        obj = load_json(args.config)
        if not isinstance(obj, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(obj) - set(PROBLEM_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        base.update(obj)
    for key in PROBLEM_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v  # inline wins
    return RunConfig(**base)


COMMANDS = {
    "constants": cmd_constants,
    "member": cmd_member,
    "boundary": cmd_boundary,
    "figure": cmd_figure,
    "discrete": cmd_discrete,
    "common-part": cmd_common_part,
    "validate": cmd_validate,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = make_config(args)
        try:
            cfg.problem
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid problem parameters: {exc}") from None
        COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except (ValueError, ArithmeticError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": "computation", "message": str(exc)}) + "\n")
        return 1
    return 0


def main() -> None:
    raise SystemExit(run())
