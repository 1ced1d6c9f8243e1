"""Pushforward measures, volume growth, and Agmon-distance growth rates."""
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .discretize import Mesh, Pencil, assemble_1d
from .eigen import bottom
from .jets import Jet

_GX, _GW = np.polynomial.legendre.leggauss(12)


class MeasureError(ValueError):
    pass


@dataclass
class PushforwardMeasure:
    bin_edges: np.ndarray
    masses: np.ndarray
    infinite: bool = True  # mass keeps growing past the represented range
    offset: float = 0.0  # mass below bin_edges[0]
    nodes: tuple = ()  # (v values, weights) of the quadrature used for the masses

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=float)
        self.masses = np.asarray(self.masses, dtype=float)
        if self.masses.size != self.bin_edges.size - 1:
            raise MeasureError("one mass per bin")
        if not np.all(np.diff(self.bin_edges) > 0):
            raise MeasureError("bin edges must increase")
        if np.any(self.masses < 0):
            raise MeasureError("masses must be nonnegative")

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    @property
    def density(self):
        return self.masses / self.widths

    @property
    def cumulative(self):
        return self.offset + np.concatenate([[0.0], np.cumsum(self.masses)])

    def V(self, r):
        """chi([start, r]) with piecewise-constant density inside bins."""
        return np.interp(r, self.bin_edges, self.cumulative)

    def S(self, r):
        return self.V(np.asarray(r) + 1.0) - self.V(r)

    def integrate(self, g):
        """int g dchi from the stored quadrature nodes."""
        if not self.nodes:
            raise MeasureError("no quadrature nodes stored")
        v, w = self.nodes
        return float(np.sum(w * g(v)))

    def to_csv(self):
        out = io.StringIO()
        out.write("r,V,S,logV_over_r\n")
        e = self.bin_edges
        inside = e[e + 1.0 <= e[-1]]
        for r in inside:
            Vr = float(self.V(r))
            lv = math.log(Vr) / r if Vr > 0 and r > 0 else float("nan")
            out.write(f"{float(r)!r},{Vr!r},{float(self.S(r))!r},{float(lv)!r}\n")
        return out.getvalue()


@dataclass(frozen=True)
class Zone:
    """Part of a radial domain parametrized by r = origin + direction * e^y.

    v must be monotone in y on [y_lo, y_hi].
    """
    origin: float
    direction: float
    y_lo: float
    y_hi: float

    def r(self, y):
        return self.origin + self.direction * np.exp(y)


def _invert(f, target, lo, hi, iters=200):
    """Vectorized bisection for monotone f on [lo, hi]."""
    target = np.asarray(target, dtype=float)
    flo = f(np.array([lo]))[0]
    fhi = f(np.array([hi]))[0]
    inc = fhi > flo
    a = np.full_like(target, lo)
    b = np.full_like(target, hi)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        below = f(mid) < target
        if not inc:
            below = ~below
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def pushforward(v, base, bins, zones, panels=8, by_distance=False):
    """chi = v_* (base dr), binned.

    v, base: functions of r (arrays), or of the distance d = e^y to the zone
    origin when by_distance is set (exact near a boundary, where r itself
    rounds). Each zone is integrated in its log variable y (dr = e^y dy);
    bins are preimaged by bisection in y.
    """
    edges = np.asarray(bins, dtype=float)
    masses = np.zeros(edges.size - 1)
    vq, wq = [], []
    for z in zones:
        def at(y, z=z):
            return np.exp(y) if by_distance else z.r(y)

        def vy(y):
            return v(at(y))
        ylo, yhi = z.y_lo, z.y_hi
        v_a, v_b = vy(np.array([ylo]))[0], vy(np.array([yhi]))[0]
        vmin, vmax = min(v_a, v_b), max(v_a, v_b)
        ce = np.clip(edges, vmin, vmax)
        ye = _invert(vy, ce, ylo, yhi)
        for k in range(edges.size - 1):
            y0, y1 = sorted((ye[k], ye[k + 1]))
            if y1 <= y0:
                continue
            sub = np.linspace(y0, y1, panels + 1)
            mid = 0.5 * (sub[:-1] + sub[1:])
            half = 0.5 * (sub[1:] - sub[:-1])
            y = (mid[:, None] + half[:, None] * _GX[None, :]).ravel()
            w = (half[:, None] * _GW[None, :]).ravel()
            r = at(y)
            dens = base(r) * np.exp(y)
            masses[k] += float(np.sum(w * dens))
            vq.append(v(r))
            wq.append(w * dens)
    nodes = (np.concatenate(vq), np.concatenate(wq)) if vq else ()
    return PushforwardMeasure(edges, masses, True, 0.0, nodes)


def frame_pushforward(frame, bins):
    """chi in v-units from a quasimode frame: density chi_s(v/2)/2 summed over ends."""
    edges = np.asarray(bins, dtype=float)
    if edges[0] < 2.0 * frame.s_min - 1e-12:
        raise MeasureError("bins start below the frame range")
    masses = np.zeros(edges.size - 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    v = (mid[:, None] + half[:, None] * _GX[None, :])
    w = half[:, None] * _GW[None, :]
    for e in frame.ends:
        masses += np.sum(w * 0.5 * e.chi(0.5 * v.ravel()).reshape(v.shape), axis=1)
    return PushforwardMeasure(edges, masses, True)


def density_measure(density, bins):
    """chi with a closed-form density on v (Gauss quadrature per bin)."""
    edges = np.asarray(bins, dtype=float)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    v = mid[:, None] + half[:, None] * _GX[None, :]
    w = half[:, None] * _GW[None, :]
    m = np.sum(w * density(v), axis=1)
    return PushforwardMeasure(edges, m, True, 0.0, (v.ravel(), (w * density(v)).ravel()))


# ---------------------------------------------------------------------------
# growth

def _windowed_slope(x, y, n_sub=5):
    """Max over sub-windows of the least-squares slope of y against x."""
    best = -math.inf
    idx = np.array_split(np.arange(x.size), n_sub)
    for ii in idx:
        if ii.size < 2:
            continue
        A = np.vstack([x[ii], np.ones(ii.size)]).T
        best = max(best, float(np.linalg.lstsq(A, y[ii], rcond=None)[0][0]))
    return best


@dataclass
class GrowthReport:
    sigma: float
    subexponential: bool
    low_confidence: bool
    criterion_table: list = field(default_factory=list)
    eps_class: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)

    def to_json(self):
        doc = {"sigma": self.sigma, "subexponential": self.subexponential,
               "low_confidence": self.low_confidence, "criterion_table": self.criterion_table,
               "eps_class": self.eps_class}
        return json.dumps(doc, sort_keys=True, indent=1)


def volume_growth(chi, threshold=0.05):
    """V and S at the bin edges and the lim-sup slope of log V over the top decade."""
    e = chi.bin_edges
    Vr = chi.cumulative
    if not np.any(Vr > 0):
        raise MeasureError("empty measure")
    r_max = e[-1]
    lo = max(e[0], r_max / 10.0)
    sel = (e >= lo) & (Vr > 0)
    sigma = max(0.0, _windowed_slope(e[sel], np.log(Vr[sel])))
    # fewer than two decades of support in v
    low = r_max / (e[0] if e[0] > 0 else e[1]) < 100.0
    inside = e + 1.0 <= r_max
    rep = GrowthReport(sigma, sigma < threshold, bool(low))
    rep.samples = {"r": e, "V": Vr, "S": np.where(inside, chi.S(e), np.nan)}
    return rep


def growth_criterion(chi, a, d, eps, report=None):
    from .quasimode import window_search
    b, ratio = window_search(chi, a, eps, d)
    row = {"a": float(a), "d": float(d), "eps": float(eps), "b": b, "ratio": ratio,
           "verdict": "found" if b is not None else "growth obstruction"}
    if report is not None:
        report.criterion_table.append(row)
    return row


def eps_exp_check(chi, eps, C_cap=1e6):
    """Smallest C with C^{-1} e^{-eps t} <= rho(t) <= C e^{eps t} on the represented bins.

    rho is the bin density; each bin is checked at its worst end.
    """
    rho = chi.density
    t0 = chi.bin_edges[:-1]
    if np.any(rho <= 0):
        return False, math.inf
    with np.errstate(over="ignore"):
        upper = rho * np.exp(-eps * t0)
        lower = np.exp(-eps * t0) / rho
    C = float(max(np.max(upper), np.max(lower), 1.0))
    return bool(C < C_cap), C


# ---------------------------------------------------------------------------
# Agmon frames

class AgmonFrame:
    """h = (1/2) X_1^{-1}(u0/u1) = (1 - log(u0/u1))/2 with W = |grad h|^2_A."""

    def __init__(self, domain, pair, op=None, weight=None):
        from .scenarios import LAPLACIAN, supersolution_weight
        self.domain = domain
        self.pair = pair
        self.op = op or LAPLACIAN
        self.W = weight or supersolution_weight(pair, self.op, domain)

    def h(self, r):
        rj = Jet.var(np.asarray(r, dtype=float))
        q = self.pair.u0(rj) / self.pair.u1(rj)
        return 0.5 * (1.0 - np.log(q.v))

    def eikonal(self, r):
        """|grad h|^2_{A/W} at r."""
        rj = Jet.var(np.asarray(r, dtype=float))
        q = self.pair.u0(rj) / self.pair.u1(rj)
        dh = -0.5 * q.d1 / q.v
        a = self.op.a_jet(self.domain, rj).v
        return a * dh * dh / self.W.jet(rj).v

    def check_complete(self, r_near_infinity):
        hv = np.abs(self.h(np.asarray(r_near_infinity, dtype=float)))
        if np.ptp(hv) < 1e-12:
            raise MeasureError("frame incomplete: h is constant")
        return bool(np.max(hv) > 10.0 * max(np.min(hv), 1.0))


def agmon_distance(frame, x, y):
    return np.abs(frame.h(x) - frame.h(y))


def frame_exterior_bottom(frame, s_a, length=200.0, N=2001):
    """Dirichlet bottom of the s-frame pencil on [s_a, s_a + length], in scenario units.

    The frame form is int chi G f'^2 + int chi V f^2 over int chi f^2; the
    scenario value is (1 + bottom)/k_scale.
    """
    nodes = np.linspace(s_a, s_a + length, N)
    mesh = Mesh(nodes, 1.0, 0.0, (), (True, True), "s-frame")

    def stiff(s):
        return sum(e.chi(s) * e.G(s) for e in frame.ends)

    def pot(s):
        return sum(e.chi(s) * e.V(s) for e in frame.ends)

    def mass(s):
        return sum(e.chi(s) for e in frame.ends)

    Kd, Ko, Md, Mo = assemble_1d(mesh, stiff, pot, mass)
    pen = Pencil(Kd, Ko, Md, Mo, mesh, {"scenario": frame.name, "frame": True})
    return (1.0 + bottom(pen)) / frame.k_scale


@dataclass
class RatesReport:
    sigma0: float
    sigma1: float
    mu0_mass: float
    mu0_finite: bool
    mu1_infinite: bool
    lam_inf_estimate: float
    brooks: dict
    equality: dict

    def to_json(self):
        return json.dumps(self.__dict__, sort_keys=True, indent=1)


def sigma_rates(frame, R_max=60.0, n=6000, lam_inf=None, exterior_start=None, tol=0.05,
                equality_tol=0.05, exterior_length=200.0):
    """Growth rates of the Agmon-ball volumes of mu0 = u0^2 W nu and mu1 = u1^2 W nu.

    In the frame variable, mu0 and mu1 have densities e^{1-2s} chi and
    e^{2s-1} chi; Agmon distance from the base point (s = s_min) is
    int ds / sqrt(G). Rates are reported in scenario units
    (distances scale by sqrt(k_scale)).
    """
    s0 = frame.s_min
    s = np.linspace(s0, s0 + R_max * 1.5, n)
    chi = sum(e.chi(s) for e in frame.ends)
    G = np.mean([e.G(s) for e in frame.ends], axis=0)
    if np.any(G <= 0):
        raise MeasureError("frame incomplete")
    ds = np.diff(s)
    hh = np.concatenate([[0.0], np.cumsum(0.5 * ds * (1 / np.sqrt(G[1:]) + 1 / np.sqrt(G[:-1])))])
    # log-domain trapezoid for e^{+-(2s-1)} chi
    with np.errstate(divide="ignore"):  # chi may underflow to 0; -inf is fine below
        lc = np.log(chi)
    l1 = lc + (2 * s - 1)
    l0 = lc - (2 * s - 1)

    def cum_log(lv):
        seg = np.logaddexp(lv[1:], lv[:-1]) + np.log(0.5 * ds)
        return np.concatenate([[-np.inf], np.logaddexp.accumulate(seg)])

    logV1 = cum_log(l1)
    # tail of mu0 beyond each point, accumulated from the far end; the part
    # past s[-1] is below e^{-2 s[-1]}, negligible against the fitted tails
    log_tail0 = cum_log(l0[::-1])[::-1]
    log_mu0 = log_tail0[0]
    sel = (hh >= 0.5 * R_max) & (hh <= R_max)
    sig1 = _windowed_slope(hh[sel], logV1[sel])
    ok = sel & np.isfinite(log_tail0)
    sig0 = _windowed_slope(hh[ok], -log_tail0[ok])
    k = frame.k_scale
    sig0_s, sig1_s = sig0 / math.sqrt(k), sig1 / math.sqrt(k)
    mu1_inf = bool(logV1[sel][-1] - logV1[sel][0] > math.log(2.0))
    if lam_inf is None:
        start = exterior_start if exterior_start is not None else s0 + 20.0
        lam_inf = frame_exterior_bottom(frame, start, exterior_length)
    brooks = {f"sigma{i}": {"lhs": lam_inf, "rhs": sg * sg / 4.0,
                            "holds": bool(lam_inf <= sg * sg / 4.0 + tol)}
              for i, sg in ((0, sig0_s), (1, sig1_s))}
    eq = {f"sigma{i}": {"sigma2_over_4": sg * sg / 4.0, "lam_inf": lam_inf,
                        "holds": bool(abs(sg * sg / 4.0 - lam_inf) <= equality_tol * max(lam_inf, 1e-12))}
          for i, sg in ((0, sig0_s), (1, sig1_s))}
    return RatesReport(sig0_s, sig1_s, float(k * math.exp(log_mu0)),
                       bool(np.isfinite(log_mu0)), mu1_inf, lam_inf, brooks, eq)
