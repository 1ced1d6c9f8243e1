"""Weyl quasimodes psi(v) e^{i mu v/2} in ground-state frames.

A frame is the operator L = u_half^{-1}(W^{-1}P - 1)u_half restricted to
functions of s = v/2 = (1 - log(u0/u1))/2. In s it reads

    L f = -G f'' + (L s) f' + V f,   G = |grad s|^2_{A/W},

over the measure chi(s) ds (the pushforward of u_half^2 W nu). Each
singular end of a domain is a separate one-dimensional piece.
"""
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import jets
from .jets import Jet
from .scenarios import LAPLACIAN, sphere_area, supersolution_weight
from .xlog import x_eval

SMOOTHSTEP_D1 = 15.0 / 8.0
SMOOTHSTEP_D2 = 10.0 / math.sqrt(3.0)
_GX, _GW = np.polynomial.legendre.leggauss(12)


class QuasimodeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# windows and cutoffs

def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    s0 = np.minimum(t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t), 1.0)
    s1 = 30.0 * t * t * (1.0 - t) ** 2
    s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    return s0, s1, s2


@dataclass(frozen=True)
class Window:
    """Cutoff support [a, b] in v-units, ramps of width `ramp` at both ends."""
    a: float
    b: float
    ramp: float = 1.0

    def __post_init__(self):
        if not self.ramp > 0:
            raise QuasimodeError("ramp must be positive")
        if self.b < self.a + 2.0 * self.ramp - 1e-12 * max(1.0, abs(self.b)):
            raise QuasimodeError("window too short: need b >= a + 2*ramp")

    @property
    def length(self):
        return self.b - self.a

    @property
    def C_bound(self):
        return SMOOTHSTEP_D1 / self.ramp + SMOOTHSTEP_D2 / self.ramp ** 2


def ramp_for(length, c=1.5):
    """Ramp width c*sqrt(length), clipped to [1, length/2]."""
    return float(min(max(c * math.sqrt(length), 1.0), 0.5 * length))


class Cutoff:
    """C^2 piecewise-quintic bump: 0 outside [a,b], 1 on [a+ramp, b-ramp]."""

    def __init__(self, window):
        self.window = window
        self.C_bound = window.C_bound

    def __call__(self, v):
        """(psi, psi', psi'') in v-units."""
        w = self.window
        v = np.asarray(v, dtype=float)
        up0, up1, up2 = _smoothstep((v - w.a) / w.ramp)
        dn0, dn1, dn2 = _smoothstep((w.b - v) / w.ramp)
        r = w.ramp
        # psi = up * dn; at most one factor differs from 1 anywhere
        psi = up0 * dn0
        d1 = (up1 * dn0 - up0 * dn1) / r
        d2 = (up2 * dn0 - 2.0 * up1 * dn1 + up0 * dn2) / r ** 2
        return psi, d1, d2


def build_cutoff(window):
    return Cutoff(window)


# ---------------------------------------------------------------------------
# frames

class EndFrame:
    """One singular end, described by functions of s."""
    s_min = 0.5

    def chi(self, s):
        raise NotImplementedError

    def Ls(self, s):
        raise NotImplementedError

    def G(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    def V(self, s):
        raise NotImplementedError


class FlatEnd(EndFrame):
    """Exact frame with G = 1 and V = L s = 0: constant density."""

    def __init__(self, density, s_min=0.5):
        self.density = float(density)
        self.s_min = float(s_min)

    def chi(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.density)

    def Ls(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def V(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))


class IteratedLogEnd(EndFrame):
    """Frame of L_i = J_i^{-1}(-Delta - W_{i-1}) near one boundary component.

    With t = delta/D and P_i = X_1...X_i(t): s = 1/(2 X_{i+1}(t)),
    chi = m/(2D), L s = -2 delta(-Delta delta)/P_i,
    V = 2 delta(-Delta delta)(1 - R_i)/P_i^2. Everything is evaluated from
    log X_k, which stays finite long after delta underflows.
    """

    def __init__(self, domain, end, i, D):
        if domain.kind not in ("interval", "ball", "annulus"):
            raise QuasimodeError("iterated-log frames need a bounded domain")
        if end not in domain.ends():
            raise QuasimodeError(f"{end!r} is not a singular end")
        self.domain, self.end, self.i, self.D = domain, end, int(i), float(D)
        self.s_min = 0.5 / x_eval(self.i + 1, domain.delta_max / self.D)

    def _logs(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0.5):
            raise QuasimodeError("s below the frame range")
        L = [None] * (self.i + 2)
        L[self.i + 1] = -np.log(2.0 * s)
        with np.errstate(over="ignore"):
            for k in range(self.i, -1, -1):
                L[k] = -np.expm1(-L[k + 1])
        return L

    def _geom(self, s):
        """(m, g/P_i, g(1 - R_i)/P_i^2) with g = delta(-Delta delta)."""
        L = self._logs(s)
        dom = self.domain
        n = dom.n
        cum = np.zeros_like(L[0])
        R = np.zeros_like(L[0])
        for k in range(1, self.i + 1):
            cum = cum + L[k]
            R = R + np.exp(cum)
        with np.errstate(under="ignore", invalid="ignore", divide="ignore", over="ignore"):
            delta = self.D * np.exp(L[0])
            if dom.kind == "interval":
                return np.ones_like(delta), np.zeros_like(delta), np.zeros_like(delta)
            r = dom.hi - delta if self.end == "hi" else dom.lo + delta
            sign = 1.0 if self.end == "hi" else -1.0
            # delta/P and delta/P^2 from logs; delta underflows long before P
            gone = np.isneginf(L[0])
            lg1 = np.where(gone, -np.inf, L[0] - cum)
            lg2 = np.where(gone, -np.inf, L[0] - 2.0 * cum)
            c = sign * (n - 1) * self.D / r
            gP = c * np.exp(lg1)
            gP2 = c * (1.0 - R) * np.exp(lg2)
        m = sphere_area(n) * r ** (n - 1)
        return m, gP, gP2

    def chi(self, s):
        return self._geom(s)[0] / (2.0 * self.D)

    def Ls(self, s):
        return -2.0 * self._geom(s)[1]

    def V(self, s):
        return 2.0 * self._geom(s)[2]


class JetEnd(EndFrame):
    """Generic frame from a profile pair, evaluated through r(s).

    `r_of_y` parametrizes the end by y so that s increases with y; s(r) is
    inverted by bisection in y.
    """

    def __init__(self, domain, pair, op=LAPLACIAN, frame_weight=None, r_of_y=None, y_range=(-700.0, 0.0)):
        self.domain, self.pair, self.op = domain, pair, op
        self.W = frame_weight if frame_weight is not None else supersolution_weight(pair, op, domain)
        self.r_of_y = r_of_y
        self.y_range = y_range
        self.s_min = float(self._s_of_r(np.atleast_1d(r_of_y(np.array(y_range[0]))))[0])
        self.s_max = float(self._s_of_r(np.atleast_1d(r_of_y(np.array(y_range[1]))))[0])

    def _s_of_r(self, r):
        rj = Jet.var(r)
        q = self.pair.u0(rj) / self.pair.u1(rj)
        return 0.5 * (1.0 - np.log(q.v))

    def r_of_s(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s > self.s_max) or np.any(s < self.s_min - 1e-12):
            raise QuasimodeError(f"s outside the represented range [{self.s_min}, {self.s_max}]")
        lo = np.full_like(s, self.y_range[0])
        hi = np.full_like(s, self.y_range[1])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            up = self._s_of_r(self.r_of_y(mid)) < s
            lo = np.where(up, mid, lo)
            hi = np.where(up, hi, mid)
        return self.r_of_y(0.5 * (lo + hi))

    def quantities(self, r):
        """(s, chi, Ls, G, V) at radial points r."""
        dom, op = self.domain, self.op
        rj = Jet.var(np.asarray(r, dtype=float))
        u0 = self.pair.u0(rj)
        u1 = self.pair.u1(rj)
        uh = jets.sqrt(u0 * u1)
        s = 0.5 * (1.0 - jets.log(u0 / u1))
        m = dom.m_jet(rj)
        a = op.a_jet(dom, rj)
        W = self.W.jet(rj).v
        uh2 = uh * uh
        F = m * a * uh2
        flux_d = F.d1 * s.d1 + F.v * s.d2  # (m a u_half^2 s')'
        Ls = -flux_d / (W * m.v * uh2.v)
        G = a.v * s.d1 ** 2 / W
        V = op.apply(dom, uh, rj) / (W * uh.v) - 1.0
        chi = m.v * uh2.v * W / np.abs(s.d1)
        return s.v, chi, Ls, G, V

    def _at(self, s, idx):
        r = self.r_of_s(s)
        return self.quantities(r)[idx]

    def chi(self, s):
        return self._at(s, 1)

    def Ls(self, s):
        return self._at(s, 2)

    def G(self, s):
        return self._at(s, 3)

    def V(self, s):
        return self._at(s, 4)


@dataclass
class Frame:
    ends: list
    k_scale: float = 1.0  # scenario weight = k_scale * frame weight
    name: str = ""

    @property
    def s_min(self):
        return max(e.s_min for e in self.ends)

    def eta_for(self, lam):
        """Frame eta for a scenario spectral value lam."""
        return self.k_scale * lam - 1.0

    def lam_for(self, eta):
        return (1.0 + eta) / self.k_scale


def iterated_log_frame(domain, i, D, k_scale=1.0, name=""):
    return Frame([IteratedLogEnd(domain, e, i, D) for e in domain.ends()], k_scale, name)


def flat_frame(density, k_scale=1.0, name="", s_min=0.5):
    return Frame([FlatEnd(density, s_min)], k_scale, name)


# ---------------------------------------------------------------------------
# residuals

def _panels(sa, sb, breaks, max_width=2.0, ratio=1.05):
    edges = [sa, sb] + [x for x in breaks if sa < x < sb]
    edges += list(np.linspace(sa, sb, int(math.ceil((sb - sa) / max_width)) + 1))
    if sa > 0:
        edges += list(np.geomspace(sa, sb, int(math.ceil(math.log(sb / sa) / math.log(ratio))) + 1))
    e = np.unique(np.asarray(edges))
    return e


def _quad(edges, per_panel=1):
    if per_panel > 1:
        e = np.unique(np.concatenate([np.linspace(edges[k], edges[k + 1], per_panel + 1)
                                      for k in range(edges.size - 1)]))
    else:
        e = edges
    mid = 0.5 * (e[:-1] + e[1:])
    half = 0.5 * (e[1:] - e[:-1])
    x = (mid[:, None] + half[:, None] * _GX[None, :]).ravel()
    w = (half[:, None] * _GW[None, :]).ravel()
    return x, w


TERMS = ("bulk_Lv", "grad_defect", "cutoff1", "cutoff2", "potential")


@dataclass
class Residual:
    eta: float
    window: Window
    ratio: float  # frame units
    scenario_ratio: float  # ratio / k_scale, units of the scenario operator
    terms: dict
    masses: dict
    bound: float
    sups: dict

    def as_row(self, scenario=""):
        return {"scenario": scenario, "eta": self.eta,
                "window": [self.window.a, self.window.b, self.window.ramp],
                "ratio": self.scenario_ratio, "frame_ratio": self.ratio,
                "terms": dict(self.terms)}


def _evaluate(frame, eta, window):
    """Pointwise residual pieces on the quadrature grid of every end."""
    mu = math.sqrt(eta)
    cut = Cutoff(window)
    sa, sb = 0.5 * window.a, 0.5 * window.b
    rs = 0.5 * window.ramp
    breaks = (sa + rs, sb - rs)
    out = []
    for end in frame.ends:
        if sa < end.s_min - 1e-12:
            raise QuasimodeError("window starts outside the frame range")
        x, w = _quad(_panels(sa, sb, breaks, max_width=min(2.0, rs / 2.0)))
        p0, p1, p2 = cut(2.0 * x)
        ps, pss = 2.0 * p1, 4.0 * p2  # derivatives in s
        chi, Ls, G, V = end.chi(x), end.Ls(x), end.G(x), end.V(x)
        t = {"bulk_Lv": (0.0 * x, mu * p0 * Ls),
             "grad_defect": (eta * (G - 1.0) * p0, 0.0 * x),
             "cutoff1": (ps * Ls - pss * G, 0.0 * x),
             "cutoff2": (0.0 * x, -2.0 * mu * ps * G),
             "potential": (V * p0, 0.0 * x)}
        out.append(dict(x=x, w=w, chi=chi, p0=p0, ps=ps, pss=pss, Ls=Ls, G=G, V=V, t=t))
    return out


def quasimode_residual(frame, eta, window):
    """Ratio ||(L - eta) phi|| / ||phi|| for phi = psi(v) e^{i mu s}, mu = sqrt(eta)."""
    if eta < 0:
        raise QuasimodeError("the construction needs eta >= 0")
    pieces = _evaluate(frame, eta, window)
    num = 0.0
    den = 0.0
    tn = {k: 0.0 for k in TERMS}
    ramp_mass = plateau_mass = 0.0
    sups = {"Ls": 0.0, "G_defect": 0.0, "V": 0.0, "Ls_ramp": 0.0, "G_ramp": 0.0}
    sa, sb, rs = 0.5 * window.a, 0.5 * window.b, 0.5 * window.ramp
    for pc in pieces:
        wc = pc["w"] * pc["chi"]
        re = sum(v[0] for v in pc["t"].values())
        im = sum(v[1] for v in pc["t"].values())
        num += float(np.sum(wc * (re * re + im * im)))
        den += float(np.sum(wc * pc["p0"] ** 2))
        for k, (a, b) in pc["t"].items():
            tn[k] += float(np.sum(wc * (a * a + b * b)))
        on_ramp = (pc["x"] < sa + rs) | (pc["x"] > sb - rs)
        ramp_mass += float(np.sum(wc[on_ramp]))
        plateau_mass += float(np.sum(wc[~on_ramp]))
        sups["Ls"] = max(sups["Ls"], float(np.max(np.abs(pc["Ls"]))))
        sups["G_defect"] = max(sups["G_defect"], float(np.max(np.abs(pc["G"] - 1.0))))
        sups["V"] = max(sups["V"], float(np.max(np.abs(pc["V"]))))
        sups["Ls_ramp"] = max(sups["Ls_ramp"], float(np.max(np.abs(pc["Ls"][on_ramp]))))
        sups["G_ramp"] = max(sups["G_ramp"], float(np.max(np.abs(pc["G"][on_ramp]))))
    if not den > 0:
        raise QuasimodeError("zero denominator: empty effective window")
    ratio = math.sqrt(num / den)
    terms = {k: math.sqrt(v / den) for k, v in tn.items()}
    mu = math.sqrt(eta)
    d1 = 2.0 * SMOOTHSTEP_D1 / window.ramp
    d2 = 4.0 * SMOOTHSTEP_D2 / window.ramp ** 2
    cut_part = (d1 * (sups["Ls_ramp"] + 2.0 * mu * sups["G_ramp"]) + d2 * sups["G_ramp"])
    bound = (eta * sups["G_defect"] + sups["V"] + mu * sups["Ls"]
             + cut_part * math.sqrt(ramp_mass / plateau_mass) if plateau_mass > 0 else math.inf)
    return Residual(float(eta), window, ratio, ratio / frame.k_scale, terms,
                    {"ramp": ramp_mass, "plateau": plateau_mass, "total": ramp_mass + plateau_mass,
                     "norm2": den}, bound, sups)


def quasimode_residual_direct(domain, pair, weight, eta, window, r_of_s, op=LAPLACIAN, k_scale=1.0,
                              n_panels=400):
    """The same ratio computed in r from U = u_half psi(v(r)) e^{i mu s(r)}.

    Applies P to U with jets and integrates |(W^{-1}P - lam)U|^2 W dnu in r,
    lam = (1 + eta)/k_scale, with W the scenario weight (a Weight object).
    Independent of the frame formulas; returns the scenario-unit ratio.
    """
    mu = math.sqrt(eta)
    lam = (1.0 + eta) / k_scale
    cut = Cutoff(window)
    sa, sb, rs = 0.5 * window.a, 0.5 * window.b, 0.5 * window.ramp
    s_edges = np.unique(np.concatenate([np.linspace(sa, sa + rs, n_panels // 4 + 1),
                                        np.linspace(sa + rs, sb - rs, n_panels // 2 + 1),
                                        np.linspace(sb - rs, sb, n_panels // 4 + 1)]))
    r_edges = np.sort(np.asarray(r_of_s(s_edges), dtype=float))
    x, w = _quad(r_edges)
    rj = Jet.var(x)
    u0 = pair.u0(rj)
    u1 = pair.u1(rj)
    uh = jets.sqrt(u0 * u1)
    s = 0.5 * (1.0 - jets.log(u0 / u1))
    p0, p1, p2 = cut(2.0 * s.v)
    psi = s.apply(p0, 2.0 * p1, 4.0 * p2)
    c = s.apply(np.cos(mu * s.v), -mu * np.sin(mu * s.v), -mu * mu * np.cos(mu * s.v))
    sn = s.apply(np.sin(mu * s.v), mu * np.cos(mu * s.v), -mu * mu * np.sin(mu * s.v))
    Wv = weight.jet(rj).v
    m = domain.m_jet(rj).v
    num = den = 0.0
    for trig in (c, sn):
        U = uh * psi * trig
        R = op.apply(domain, U, rj) / Wv - lam * U.v
        num += float(np.sum(w * R * R * Wv * m))
        den += float(np.sum(w * U.v * U.v * Wv * m))
    return math.sqrt(num / den)


# ---------------------------------------------------------------------------
# probes

def default_lengths():
    return (25.0, 50.0, 100.0, 200.0)


def schedule(frame, lengths=None, c_ramp=1.5, a0=None, lv_rule=True):
    """Windows of the given v-lengths; a_n advanced until sup|Lv| <= 1/n."""
    lengths = default_lengths() if lengths is None else lengths
    a = max(2.0 * frame.s_min, 1.0) if a0 is None else float(a0)
    out = []
    for n, Lw in enumerate(lengths, start=1):
        an = a
        if lv_rule:
            for _ in range(200):
                s = np.linspace(0.5 * an, 0.5 * (an + Lw), 64)
                lv = max(float(np.max(np.abs(2.0 * e.Ls(s)))) for e in frame.ends)
                if lv <= 1.0 / n:
                    break
                an = an * 1.25 + 1.0
        out.append(Window(an, an + Lw, ramp_for(Lw, c_ramp)))
    return out


@dataclass
class QuasimodeReport:
    scenario: str
    tol: float
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    persson: dict = field(default_factory=dict)

    def certified(self, eta=None):
        if eta is not None:
            return self.summary[eta]["certified"]
        return all(v["certified"] for v in self.summary.values())

    def to_json(self):
        doc = {"scenario": self.scenario, "tol": self.tol,
               "rows": [{"scenario": r["scenario"], "eta": r["eta"], "window": r["window"],
                         "ratio": r["ratio"], "terms": r["terms"], "certified": r["certified"]}
                        for r in self.rows],
               "summary": {repr(k): v for k, v in self.summary.items()},
               "persson": self.persson}
        return json.dumps(doc, sort_keys=True, indent=1)

    def to_csv(self):
        out = io.StringIO()
        out.write("scenario,eta,a,b,ramp,ratio," + ",".join(TERMS) + ",certified\n")
        for r in self.rows:
            a, b, rp = r["window"]
            nums = [r["eta"], a, b, rp, r["ratio"]] + [r["terms"][k] for k in TERMS]
            out.write(r["scenario"] + "," + ",".join(repr(float(x)) for x in nums)
                      + f",{int(r['certified'])}\n")
        return out.getvalue()


def _slope(x, y):
    lx, ly = np.log(np.asarray(x)), np.log(np.asarray(y))
    if lx.size < 2:
        return float("nan")
    A = np.vstack([lx, np.ones_like(lx)]).T
    return float(np.linalg.lstsq(A, ly, rcond=None)[0][0])


def ess_spectrum_probe(frame, eta_grid, windows=None, tol=0.02, extend_to=None, c_ramp=1.5):
    """Certify each eta: some window ratio (scenario units) <= tol and a negative fitted slope.

    extend_to: keep doubling the window length up to this v-length while
    the ratio is above tol.
    """
    eta_grid = [float(e) for e in eta_grid]
    if any(e < 0 for e in eta_grid):
        raise QuasimodeError("eta must be nonnegative (lambda below the essential bottom)")
    if windows is None:
        windows = schedule(frame, c_ramp=c_ramp)
    rep = QuasimodeReport(frame.name, tol)
    for eta in eta_grid:
        ws = list(windows)
        ratios, masses = [], []
        k = 0
        while k < len(ws):
            res = quasimode_residual(frame, eta, ws[k])
            ok = res.scenario_ratio <= tol
            ratios.append(res.scenario_ratio)
            masses.append(res.masses["total"])
            row = res.as_row(frame.name)
            row["certified"] = ok
            rep.rows.append(row)
            k += 1
            if k == len(ws) and not ok and extend_to and ws[-1].length * 2 <= extend_to:
                Lw = ws[-1].length * 2
                ws.append(Window(ws[-1].a, ws[-1].a + Lw, ramp_for(Lw, c_ramp)))
        slope = _slope(masses, ratios)
        best = min(ratios)
        rep.summary[eta] = {"lambda": frame.lam_for(eta), "best_ratio": best, "slope": slope,
                            "certified": bool(best <= tol and slope < 0),
                            "windows": len(ratios)}
    # Persson side: the frame potential should vanish along the schedule
    sups = []
    for w in windows:
        s = np.linspace(0.5 * w.a, 0.5 * w.b, 64)
        sups.append(max(float(np.max(np.abs(e.V(s)))) for e in frame.ends))
    rep.persson = {"sup_V": sups, "V_to_zero": bool(sups[-1] <= sups[0] + 1e-15 and sups[-1] < 0.05)}
    return rep


# ---------------------------------------------------------------------------
# weight-equivalence transfer

def far_field_bump(s_center, width, size=0.01):
    """W2/W1 - 1 = size * (1 + tanh((s - s_center)/width))/2."""
    def beta(s):
        return size * 0.5 * (1.0 + np.tanh((np.asarray(s) - s_center) / width))
    return beta


def transfer_residual(frame, lam, window, beta):
    """Residuals of (P/W1 - lam) and (P/W2 - lam) on u = u_half phi, W2 = W1 (1 + beta(s)).

    Returns (ratio_W1, bound_W2, ratio_W2), all in scenario units. The bound
    is the triangle inequality of the transfer argument:
    ||(P/W2 - lam)u|| <= ||(W1/W2)(P/W1 - lam)u|| + |lam| ||(W1/W2 - 1)u||.
    """
    k = frame.k_scale
    eta = frame.eta_for(lam)
    if eta < 0:
        raise QuasimodeError("lam below the frame bottom")
    pieces = _evaluate(frame, eta, window)
    n1 = d1 = n2 = d2 = bA = bB = 0.0
    for pc in pieces:
        wc = pc["w"] * pc["chi"]
        re = sum(v[0] for v in pc["t"].values()) / k  # (P/W1 - lam) in frame form
        im = sum(v[1] for v in pc["t"].values()) / k
        b = np.asarray(beta(pc["x"]), dtype=float)
        if np.any(1.0 + b <= 0):
            raise QuasimodeError("weights not comparable on the window")
        q = 1.0 / (1.0 + b)  # W1/W2
        p0 = pc["p0"]
        n1 += float(np.sum(wc * (re * re + im * im)))
        d1 += float(np.sum(wc * p0 * p0))
        # (q F + lam (q - 1) psi) e^{i mu s} with F = re + i im
        n2 += float(np.sum(wc * (1.0 + b) * ((q * re + lam * (q - 1.0) * p0) ** 2 + (q * im) ** 2)))
        d2 += float(np.sum(wc * (1.0 + b) * p0 * p0))
        bA += float(np.sum(wc * (1.0 + b) * q * q * (re * re + im * im)))
        bB += float(np.sum(wc * (1.0 + b) * ((q - 1.0) * p0) ** 2))
    ratio1 = math.sqrt(n1 / d1)
    ratio2 = math.sqrt(n2 / d2)
    bound = math.sqrt(bA / d2) + abs(lam) * math.sqrt(bB / d2)
    return ratio1, bound, ratio2


# ---------------------------------------------------------------------------
# window search on pushforward measures

def window_search(chi, a, eps, d):
    """Smallest represented b >= a + d with S(b)/(V(b) - V(a)) <= eps.

    The comparison is non-strict so that a ratio landing exactly on eps
    (uniform densities) is accepted.

    S(b) = chi([b, b+1]). Returns (b, ratio) or (None, last ratio) when the
    represented range is exhausted (growth obstruction).
    """
    edges = chi.bin_edges
    cand = edges[(edges >= a + d - 1e-12) & (edges + 1.0 <= edges[-1] + 1e-12)]
    if a + d <= edges[-1] - 1.0 and (cand.size == 0 or cand[0] > a + d + 1e-12):
        cand = np.concatenate([[a + d], cand])
    Va = chi.V(a)
    last = None
    for b in cand:
        S = chi.V(b + 1.0) - chi.V(b)
        den = chi.V(b) - Va
        if den <= 0:
            continue
        last = S / den
        # non-strict, with room for rounding in the bin masses
        if last <= eps * (1.0 + 1e-12):
            return float(b), float(last)
    return None, (None if last is None else float(last))
