"""Command-line driver.

Exit codes: 0 when every check passes, 2 when a check fails, 1 on usage
errors (bad arguments, unknown scenarios, invalid configs).
"""
import argparse
import io
import json
import math
import os
import sys

import numpy as np
from pydantic import ValidationError

from . import acceptance, catalog
from .config import RunConfig, dump, load
from .discretize import AssemblyError, MeshError, assemble_pencil, make_mesh
from .eigen import EigenError, count_below, eig_bottom, eig_csv
from .measures_agmon import (AgmonFrame, MeasureError, agmon_distance, density_measure,
                             eps_exp_check, frame_pushforward, growth_criterion, sigma_rates,
                             volume_growth)
from .quasimode import QuasimodeError, ess_spectrum_probe, far_field_bump, schedule, transfer_residual
from .scenarios import (ScenarioError, WeightSpec, appendix_identity, model_end_conditions,
                        multipolar_residual, verify_bft_identities, verify_supconstruct)
from .xlog import DomainError, NonConvergence, series_sum, select_D, x_all

USAGE_ERRORS = (ValidationError, ScenarioError, MeshError, AssemblyError, DomainError, ValueError,
                FileNotFoundError, QuasimodeError, MeasureError, EigenError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # no prefix matching: `--c` must not resolve to the global `--config`
    def __init__(self, *args, **kw):
        kw.setdefault("allow_abbrev", False)
        super().__init__(*args, **kw)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _csv(header, rows):
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) for v in r) + "\n")
    return out.getvalue()


def _fmt(v):
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _json(obj):
    return json.dumps(acceptance._plain(obj), sort_keys=True, indent=1) + "\n"


class Result:
    """Artifacts of one command plus the outcome of its checks."""

    def __init__(self, name, ok=True, csv=None, doc=None, extra=None):
        self.name, self.ok, self.csv, self.doc = name, ok, csv, doc
        self.extra = extra or {}  # additional files: name -> text


# ---------------------------------------------------------------------------
# helpers

def _scenario(args, cfg):
    name = args.scenario or cfg.scenario
    sc = catalog.get(name)
    w = getattr(args, "weight", None)
    if w:
        sc = catalog.with_weight(sc, w)
    elif cfg.weight is not None and (args.scenario is None or args.scenario == cfg.scenario):
        sc.weight = WeightSpec(**cfg.weight.model_dump())
        sc.lam0 = None
    return sc


def _mesh_params(args, cfg):
    N = args.N if args.N is not None else cfg.mesh.N
    q = args.q if args.q is not None else cfg.mesh.q
    eps = args.eps_min if args.eps_min is not None else cfg.mesh.eps_min
    return N, q, eps


def _pencil(sc, args, cfg):
    if sc.pointwise:
        raise UsageError(f"{sc.name} is a pointwise scenario; spectra are not discretized")
    N, q, eps = _mesh_params(args, cfg)
    w = sc.weight_obj()
    mesh = make_mesh(sc.domain, N, q, eps, singular_ends=w.singular_ends if w else ())
    return assemble_pencil(sc.domain, sc.op, w, mesh, scenario=sc.name)


def _points(rng, dom, n):
    lo, hi = dom.lo, dom.hi
    pts = []
    while len(pts) < n:
        r = rng.uniform(lo, hi)
        if r <= lo or r >= hi or (dom.kind == "ball" and r < 1e-6):
            continue
        if dom.ridge is not None and abs(r - dom.ridge) <= 1.01 * dom.ridge_exclusion * dom.diameter:
            continue
        pts.append(r)
    return np.sort(np.array(pts))


def _residual_csv(rep):
    rows = rep.rows()
    labels = list(rep.residuals)
    return _csv(["point"] + labels, [[r["point"]] + [r[k] for k in labels] for r in rows])


# ---------------------------------------------------------------------------
# xlog

def cmd_xlog(args, cfg):
    if args.sub == "eval":
        t = np.array(_floats(args.t))
        xs = x_all(args.i, t)
        rows = [[tv] + [float(x[k]) for x in xs] for k, tv in enumerate(t)]
        return Result("xlog-eval", csv=_csv(["t"] + [f"X{j}" for j in range(1, args.i + 1)], rows),
                      doc={"i": args.i, "t": t, "X": [x for x in xs]})
    if args.sub == "series":
        try:
            st = series_sum(float(args.t), tol=args.tol)
            ok = True
        except NonConvergence as e:
            st, ok = e.state, False
        rows = [[k + 1, v] for k, v in enumerate(st.partial_sums)]
        doc = {"t": st.t, "value": st.value, "remainder_bound": st.remainder_bound,
               "converged": st.converged, "heuristic": st.heuristic, "n_terms": st.n_terms}
        return Result("xlog-series", ok, _csv(["n", "partial_sum"], rows), doc)
    i_max = args.i_max if args.i_max == "all" else int(args.i_max)
    D = select_D(args.delta_max, i_max, margin=args.margin)
    doc = {"delta_max": args.delta_max, "i_max": i_max, "margin": args.margin, "D": D}
    return Result("xlog-select-d", csv=_csv(["delta_max", "i_max", "margin", "D"],
                                             [[args.delta_max, i_max, args.margin, D]]), doc=doc)


# ---------------------------------------------------------------------------
# verify

def _bft_D(sc, variant):
    spec = sc.weight
    if spec is not None and spec.family in ("IteratedLogJ", "IteratedLogW") and spec.D is not None:
        return spec.D
    sup = sc.domain.hi if variant == "origin" else sc.domain.delta_max
    return select_D(sup, "all")


def cmd_verify(args, cfg):
    rng = np.random.default_rng(args.seed)
    tol = args.tol
    if args.sub == "supconstruct":
        sc = _scenario(args, cfg)
        if sc.pair is None or sc.domain is None:
            raise UsageError(f"{sc.name} has no profile pair")
        rep = verify_supconstruct(sc.pair, sc.op, sc.domain, _points(rng, sc.domain, args.points))
        return Result("verify-supconstruct", rep.max() < tol, _residual_csv(rep),
                      {"scenario": sc.name, "max": rep.max(), "tol": tol, "seed": args.seed})
    if args.sub == "bft":
        sc = _scenario(args, cfg)
        if sc.domain is None or sc.domain.kind == "exterior":
            raise UsageError("bft identities need a bounded domain")
        D = _bft_D(sc, args.variant)
        rep = verify_bft_identities(args.i, D, sc.domain, _points(rng, sc.domain, args.points), args.variant)
        return Result("verify-bft", rep.max() < tol, _residual_csv(rep),
                      {"scenario": sc.name, "i": args.i, "D": D, "variant": args.variant,
                       "max": rep.max(), "tol": tol, "seed": args.seed})
    if args.sub == "multipolar":
        n, N = args.n, args.poles
        if N > 2 * n:
            raise UsageError("at most 2n poles are placed on the coordinate axes")
        P = np.array([s * np.eye(n)[k] for k in range(n) for s in (1.0, -1.0)][:N])
        pts = []
        while len(pts) < args.points:
            x = rng.uniform(-3.0, 3.0, n)
            if np.min(np.linalg.norm(P - x, axis=1)) > 0.05:
                pts.append(x)
        pts = np.array(pts)
        out = multipolar_residual(n, P, pts)
        rows = [list(p) + [float(out["v"][k]), float(out["W"][k]), float(out["residual"][k])]
                for k, p in enumerate(pts)]
        mx = float(np.max(out["residual"]))
        return Result("verify-multipolar", mx < tol,
                      _csv([f"x{j}" for j in range(n)] + ["v", "W", "residual"], rows),
                      {"n": n, "N": N, "eigenvalue": out["eigenvalue"], "C": out["C"], "max": mx,
                       "tol": tol, "seed": args.seed})
    if args.sub == "appendix":
        r = np.sort(rng.uniform(1e-6, args.D, args.points))
        out = appendix_identity(args.n, args.k, r, args.D)
        mx = float(np.max(out["residual"]))
        rows = [[r[j], out["lhs"][j], out["rhs"][j], out["residual"][j]] for j in range(r.size)]
        return Result("verify-appendix", mx < tol and out["inequality"],
                      _csv(["r", "lhs", "rhs", "residual"], rows),
                      {"n": args.n, "k": args.k, "D": args.D, "max": mx, "inequality": out["inequality"],
                       "tol": tol, "seed": args.seed})
    # modelend
    r = np.geomspace(args.r_min, args.r_max, 61)
    out = model_end_conditions(args.n, args.c, r)
    rows = [[r[j], out["cond1"][j], out["cond2"][j], out["cond3"][j], out["density"][j]]
            for j in range(r.size)]
    slopes = out["slopes"]
    ok = args.c == 0 or all(v is not None and v <= -0.9 for v in slopes.values())
    return Result("verify-modelend", ok, _csv(["r", "cond1", "cond2", "cond3", "density"], rows),
                  {"n": args.n, "c": args.c, "slopes": slopes, "density_limit": out["density_limit"]})


# ---------------------------------------------------------------------------
# mesh / eig

def cmd_mesh(args, cfg):
    sc = _scenario(args, cfg)
    pen = _pencil(sc, args, cfg)
    m = pen.mesh
    doc = {"scenario": sc.name, "N": m.N, "q": m.q, "eps_min": m.eps_min, "graded": list(m.graded),
           "grading_ok": m.grading_ok(), "h_min": float(np.min(m.h)), "h_max": float(np.max(m.h))}
    return Result("mesh", m.grading_ok(), _csv(["node"], [[x] for x in m.nodes]), doc,
                  {"mesh-pencil.txt": pen.to_text()})


def cmd_eig(args, cfg):
    sc = _scenario(args, cfg)
    pen = _pencil(sc, args, cfg)
    tol = args.tol if args.tol is not None else cfg.spectral.tol
    if args.sub == "bottom":
        k = args.k if args.k is not None else cfg.spectral.k
        eigs = eig_bottom(pen, k, tol)
        ok = sc.lam0 is None or eigs[0].value >= sc.lam0 - 1e-9
        doc = {"scenario": sc.name, "weight": pen.meta["weight"], "lam0": sc.lam0,
               "eigenvalues": [e.__dict__ for e in eigs], "check": ok}
        return Result("eig-bottom", ok, eig_csv(eigs), doc)
    thr = args.threshold if args.threshold is not None else cfg.spectral.threshold
    if thr is None:
        raise UsageError("eig count needs --threshold")
    c = count_below(pen, thr)
    ok = args.expect is None or c == args.expect
    return Result("eig-count", ok, _csv(["threshold", "count"], [[thr, c]]),
                  {"scenario": sc.name, "threshold": thr, "count": c, "expect": args.expect})


# ---------------------------------------------------------------------------
# probe

def cmd_probe(args, cfg):
    sc = _scenario(args, cfg)
    fr = sc.frame()
    if args.sub == "ess":
        if args.lam:
            etas = [fr.eta_for(l) for l in _floats(args.lam)]
        elif args.eta:
            etas = _floats(args.eta)
        else:
            etas = list(cfg.quasimode.eta_grid)
        lengths = _floats(args.lengths) if args.lengths else cfg.quasimode.windows
        tol = args.tol if args.tol is not None else cfg.quasimode.tol
        ext = args.extend_to if args.extend_to is not None else cfg.quasimode.extend_to
        rep = ess_spectrum_probe(fr, etas, schedule(fr, lengths), tol=tol, extend_to=ext)
        return Result("probe-ess", rep.certified(), rep.to_csv(), json.loads(rep.to_json()))
    w = schedule(fr, (args.length,))[0]
    beta = far_field_bump(0.25 * (w.a + w.b), 0.05 * args.length, args.size)
    s = np.linspace(0.5 * w.a, 0.5 * w.b, 2001)
    defect = float(np.max(np.abs(1.0 / (1.0 + beta(s)) - 1.0)))
    rows, ok = [], True
    for lam in _floats(args.lam or "1"):
        r1, bnd, r2 = transfer_residual(fr, lam, w, beta)
        rhs = 2.0 * r1 + abs(lam) * defect + 1e-6
        ok = ok and r2 <= rhs
        rows.append([lam, r1, r2, bnd, rhs, r2 <= rhs])
    return Result("probe-transfer", ok,
                  _csv(["lambda", "ratio_W1", "ratio_W2", "triangle_bound", "rhs", "holds"], rows),
                  {"scenario": sc.name, "window": [w.a, w.b, w.ramp], "sup_defect": defect,
                   "rows": rows})


# ---------------------------------------------------------------------------
# growth / agmon

SYNTHETIC = {"uniform": lambda v: np.ones_like(v), "exp1": np.exp,
             "exp2": lambda v: np.exp(2.0 * v)}


def _chi(args, cfg):
    start, stop, step = cfg.growth.bins
    if args.bins:
        start, stop, step = _floats(args.bins)
    if args.density:
        if args.density not in SYNTHETIC:
            raise UsageError(f"unknown density {args.density!r}; known: {', '.join(SYNTHETIC)}")
        return density_measure(SYNTHETIC[args.density], np.arange(start, stop + 0.5 * step, step))
    fr = _scenario(args, cfg).frame()
    start = max(start, math.ceil(2.0 * fr.s_min))
    return frame_pushforward(fr, np.arange(start, stop + 0.5 * step, step))


def cmd_growth(args, cfg):
    chi = _chi(args, cfg)
    eps = args.eps if args.eps is not None else cfg.growth.eps
    rep = volume_growth(chi)
    if args.sub == "sigma":
        return Result("growth-sigma", True, chi.to_csv(), json.loads(rep.to_json()))
    if args.sub == "criterion":
        row = growth_criterion(chi, args.a, args.d, eps, rep)
        return Result("growth-criterion", True, _csv(["a", "d", "eps", "b", "ratio", "verdict"],
                                                      [[row[k] for k in ("a", "d", "eps", "b", "ratio",
                                                                         "verdict")]]),
                      json.loads(rep.to_json()))
    verdict, C = eps_exp_check(chi, eps)
    rep.eps_class = {"eps": eps, "eps_exponential": verdict, "C": C}
    return Result("growth-eps-class", True, _csv(["eps", "eps_exponential", "C"], [[eps, verdict, C]]),
                  json.loads(rep.to_json()))


def cmd_agmon(args, cfg):
    sc = _scenario(args, cfg)
    if args.sub == "distance":
        if sc.pair is None or sc.domain is None:
            raise UsageError(f"{sc.name} has no profile pair")
        af = AgmonFrame(sc.domain, sc.pair, sc.op, sc.weight_obj() if sc.weight else None)
        xs, ys = np.array(_floats(args.x)), np.array(_floats(args.y))
        if xs.size != ys.size:
            raise UsageError("--x and --y need the same number of points")
        sc.domain.check_points(np.concatenate([xs, ys]))
        d = agmon_distance(af, xs, ys)
        rows = [[xs[k], ys[k], d[k]] for k in range(xs.size)]
        return Result("agmon-distance", True, _csv(["x", "y", "distance"], rows),
                      {"scenario": sc.name, "rows": rows})
    rates = sigma_rates(sc.frame())
    ok = all(v["holds"] for v in rates.brooks.values())
    doc = json.loads(rates.to_json())
    rows = [[k, v["lhs"], v["rhs"], v["holds"]] for k, v in sorted(rates.brooks.items())]
    return Result("agmon-rates", ok, _csv(["rate", "lam_inf", "sigma2_over_4", "brooks"], rows), doc)


# ---------------------------------------------------------------------------
# acceptance and report

def cmd_accept(args, cfg):
    ids = args.ids.split(",") if args.ids else cfg.acceptance
    for k in ids:
        if k not in acceptance.RUNNERS:
            raise UsageError(f"unknown criterion {k}")
    outs = []
    for k in ids:
        fn = acceptance.RUNNERS[k]
        o = fn(seed=args.seed) if k in ("A4", "A5") else fn()
        print(o.line(), file=sys.stderr)
        outs.append(o)
    # timings are left out of the artifacts so reruns are byte-identical
    doc = {"acceptance": [{"id": o.id, "status": "PASS" if o.passed else "FAIL",
                           "details": o.to_dict()["details"]} for o in outs], "seed": args.seed}
    rows = [[o.id, "PASS" if o.passed else "FAIL"] for o in outs]
    return Result("acceptance", all(o.passed for o in outs), _csv(["id", "status"], rows), doc)


def report_bundle(out_dir):
    """Aggregate acceptance statuses found in the JSON outputs of a directory."""
    if not os.path.isdir(out_dir):
        raise UsageError(f"no such directory: {out_dir}")
    files = sorted(f for f in os.listdir(out_dir) if f.endswith(".json") and f != "summary.json")
    if not files:
        raise UsageError(f"no run outputs in {out_dir}")
    status = {}
    sources = {}
    for f in files:
        with open(os.path.join(out_dir, f)) as fh:
            doc = json.load(fh)
        for item in doc.get("acceptance", []) if isinstance(doc, dict) else []:
            status[item["id"]] = item["status"]
            sources[item["id"]] = f
    criteria = {k: status.get(k, "not-run") for k in acceptance.IDS}
    return {"criteria": criteria, "sources": {k: sources[k] for k in acceptance.IDS if k in sources},
            "files": files, "all_pass": all(v == "PASS" for v in criteria.values())}


def cmd_report(args, cfg):
    d = args.dir or args.out or cfg.output.dir
    summ = report_bundle(d)
    rows = [[k, v] for k, v in summ["criteria"].items()]
    return Result("summary", summ["all_pass"], _csv(["id", "status"], rows), summ)


# ---------------------------------------------------------------------------
# parser

def _add_scenario(p, weight=False):
    p.add_argument("--scenario", help="scenario name (see `hardyspec scenarios`)")
    if weight:
        p.add_argument("--weight", choices=sorted(catalog.WEIGHT_NAMES))


def _add_mesh(p):
    p.add_argument("--N", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--eps-min", type=float, dest="eps_min")


def _add_globals(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="directory for artifacts")
    p.add_argument("--seed", type=int, help="seed for sampled points (u64)")
    p.add_argument("--format", help="comma list of csv,json")


def build_parser():
    ap = _Parser(prog="hardyspec", description="Spectral checks for weighted Hardy inequalities.")
    _add_globals(ap)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    x = sub.add_parser("xlog").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = x.add_parser("eval")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--t", required=True, help="comma list of points in (0, 1]")
    p = x.add_parser("series")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p = x.add_parser("select-d")
    p.add_argument("--delta-max", type=float, required=True, dest="delta_max")
    p.add_argument("--i-max", default="all", dest="i_max")
    p.add_argument("--margin", type=float, default=0.0)

    v = sub.add_parser("verify").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name in ("supconstruct", "bft", "multipolar", "appendix", "modelend"):
        p = v.add_parser(name)
        p.add_argument("--points", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-8)
        if name in ("supconstruct", "bft"):
            _add_scenario(p)
        if name == "bft":
            p.add_argument("--i", type=int, default=1)
            p.add_argument("--variant", choices=("delta", "origin"), default="delta")
        if name in ("multipolar", "appendix", "modelend"):
            p.add_argument("--n", type=int, default=3)
        if name == "multipolar":
            p.add_argument("--poles", type=int, default=2)
        if name == "appendix":
            p.add_argument("--k", type=int, default=2)
            p.add_argument("--D", type=float, default=1.0)
        if name == "modelend":
            p.add_argument("--c", type=float, default=1.0)
            p.add_argument("--r-min", type=float, default=1e4, dest="r_min")
            p.add_argument("--r-max", type=float, default=1e10, dest="r_max")

    p = sub.add_parser("mesh")
    _add_scenario(p, weight=True)
    _add_mesh(p)

    e = sub.add_parser("eig").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name in ("bottom", "count"):
        p = e.add_parser(name)
        _add_scenario(p, weight=True)
        _add_mesh(p)
        p.add_argument("--tol", type=float)
        if name == "bottom":
            p.add_argument("--k", type=int)
        else:
            p.add_argument("--threshold", type=float)
            p.add_argument("--expect", type=int, help="fail unless the count equals this")

    pr = sub.add_parser("probe").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = pr.add_parser("ess")
    _add_scenario(p)
    p.add_argument("--eta", help="comma list of frame eta values")
    p.add_argument("--lam", help="comma list of spectral values (overrides --eta)")
    p.add_argument("--lengths", help="comma list of window v-lengths")
    p.add_argument("--tol", type=float)
    p.add_argument("--extend-to", type=float, dest="extend_to")
    p = pr.add_parser("transfer")
    _add_scenario(p)
    p.add_argument("--lam", default="1,1.25")
    p.add_argument("--length", type=float, default=200.0)
    p.add_argument("--size", type=float, default=0.01)

    g = sub.add_parser("growth").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name in ("sigma", "criterion", "eps-class"):
        p = g.add_parser(name)
        _add_scenario(p)
        p.add_argument("--density", help="synthetic density: " + ", ".join(SYNTHETIC))
        p.add_argument("--bins", help="start,stop,step")
        p.add_argument("--eps", type=float)
        if name == "criterion":
            p.add_argument("--a", type=float, default=10.0)
            p.add_argument("--d", type=float, default=5.0)

    a = sub.add_parser("agmon").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = a.add_parser("distance")
    _add_scenario(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p = a.add_parser("rates")
    _add_scenario(p)

    p = sub.add_parser("report")
    p.add_argument("dir", nargs="?")
    p = sub.add_parser("accept")
    p.add_argument("--ids", help="comma list of criteria, default all")
    sub.add_parser("scenarios")
    return ap


COMMANDS = {"xlog": cmd_xlog, "verify": cmd_verify, "mesh": cmd_mesh, "eig": cmd_eig,
            "probe": cmd_probe, "growth": cmd_growth, "agmon": cmd_agmon, "report": cmd_report,
            "accept": cmd_accept}


def _write(res, out_dir, formats):
    os.makedirs(out_dir, exist_ok=True)
    if "csv" in formats and res.csv is not None:
        with open(os.path.join(out_dir, res.name + ".csv"), "w") as fh:
            fh.write(res.csv)
    if "json" in formats and res.doc is not None:
        with open(os.path.join(out_dir, res.name + ".json"), "w") as fh:
            fh.write(_json(res.doc))
    for name, text in res.extra.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)


def main(argv=None):
    # global flags may appear anywhere on the command line
    pre = _Parser(add_help=False)
    _add_globals(pre)
    glob, rest = pre.parse_known_args(argv)
    args = build_parser().parse_args(rest)
    for k, v in vars(glob).items():
        if v is not None:
            setattr(args, k, v)
    try:
        cfg = load(args.config) if args.config else RunConfig()
        if args.seed is None:
            args.seed = cfg.seed
        if not (0 <= args.seed < 2 ** 64):
            raise UsageError("seed must be an unsigned 64-bit integer")
        formats = cfg.output.formats
        if args.format:
            formats = [f.strip() for f in args.format.split(",") if f.strip()]
            if not formats or any(f not in ("csv", "json") for f in formats):
                raise UsageError("--format takes a comma list of csv,json")
        if args.cmd == "scenarios":
            sys.stdout.write("\n".join(catalog.NAMES) + "\n")
            return 0
        res = COMMANDS[args.cmd](args, cfg)
    except UsageError as e:
        print(f"hardyspec: error: {e}", file=sys.stderr)
        return 1
    except USAGE_ERRORS as e:
        print(f"hardyspec: error: {e}", file=sys.stderr)
        return 1
    out_dir = args.out or (cfg.output.dir if args.config else None)
    if out_dir:
        _write(res, out_dir, formats)
        if args.config and args.cmd != "report":
            with open(os.path.join(out_dir, "config.json"), "w") as fh:
                fh.write(dump(cfg))
    if "csv" in formats and res.csv is not None:
        sys.stdout.write(res.csv)
    elif res.doc is not None:
        sys.stdout.write(_json(res.doc))
    return 0 if res.ok else 2


if __name__ == "__main__":
    sys.exit(main())
