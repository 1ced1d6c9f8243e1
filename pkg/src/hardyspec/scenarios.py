"""Domains, operators, weight families and pointwise identity checks.

Everything is radial: a point is its radial coordinate r (or x on an
interval). Profiles are jet expressions in r, so the closed-form identity
checks use exact first and second derivatives.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .jets import Jet
from .xlog import x_all, x_jet


class ScenarioError(ValueError):
    pass


def sphere_area(n):
    """|S^{n-1}|; the interval uses density 1 instead."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class DomainSpec:
    kind: str  # interval | ball | annulus | exterior
    n: int = 1
    lo: float = 0.0
    hi: float = 1.0
    c: float = 0.0  # model end: |grad r|^2 = 1 - c/r
    ridge_exclusion: float = 1e-3  # fraction of the diameter

    def __post_init__(self):
        if self.kind not in ("interval", "ball", "annulus", "exterior"):
            raise ScenarioError(f"unknown domain kind {self.kind!r}")
        if not self.hi > self.lo:
            raise ScenarioError("domain must have positive extent")
        if self.kind == "ball" and self.lo != 0.0:
            raise ScenarioError("a ball starts at r = 0")
        if self.c and self.kind != "exterior":
            raise ScenarioError("gradient profile only applies to model ends")
        if self.kind == "exterior" and self.c > 0 and self.lo <= self.c:
            raise ScenarioError("model end needs r_min > c so that |grad r|^2 > 0")

    @property
    def diameter(self):
        if self.kind == "ball":
            return 2.0 * self.hi
        return self.hi - self.lo

    @property
    def delta_max(self):
        if self.kind == "ball":
            return self.hi
        if self.kind in ("interval", "annulus"):
            return 0.5 * (self.hi - self.lo)
        raise ScenarioError("distance to the boundary is not used on model ends")

    @property
    def ridge(self):
        if self.kind in ("interval", "annulus"):
            return 0.5 * (self.lo + self.hi)
        if self.kind == "ball":
            return 0.0
        return None

    def ends(self):
        """Boundary components carrying the singularity."""
        if self.kind == "ball":
            return ("hi",)
        return ("lo", "hi")

    def contains(self, r):
        r = np.asarray(r, dtype=float)
        return bool(np.all((r > self.lo) & (r < self.hi))) or (
            self.kind == "ball" and bool(np.all((r >= 0.0) & (r < self.hi))))

    def check_points(self, r):
        if not self.contains(r):
            raise ScenarioError(f"points outside the domain interior: {r!r}")

    def check_off_ridge(self, r):
        rid = self.ridge
        if rid is None:
            return
        tol = self.ridge_exclusion * self.diameter
        if np.any(np.abs(np.asarray(r, dtype=float) - rid) <= tol):
            raise ScenarioError("sample on the ridge set, where delta is not C^2")

    # -- geometry in jets -------------------------------------------------
    def side(self, r):
        """True where the nearest singular end is 'lo'."""
        r = np.asarray(r, dtype=float)
        if self.kind == "ball":
            return np.zeros_like(r, dtype=bool)
        return r < 0.5 * (self.lo + self.hi)

    def delta(self, r):
        if self.kind == "exterior":
            raise ScenarioError("distance to the boundary is not used on model ends")
        r = np.asarray(r, dtype=float)
        if self.kind == "ball":
            return self.hi - r
        return np.minimum(r - self.lo, self.hi - r)

    def delta_jet(self, rj, side=None):
        if self.kind == "exterior":
            raise ScenarioError("distance to the boundary is not used on model ends")
        lo_side = self.side(rj.v) if side is None else np.full(np.shape(rj.v), side == "lo")
        sgn = np.where(lo_side, 1.0, -1.0)
        base = np.where(lo_side, -self.lo, self.hi)
        return Jet(base + sgn * rj.v, sgn * rj.d1, sgn * rj.d2)

    def m_jet(self, rj):
        """Radial density of the base measure nu."""
        if self.kind == "interval":
            return Jet.const(1.0, rj.v)
        area = sphere_area(self.n)
        if self.kind == "exterior" and self.c:
            return area * (rj - self.c) ** (self.n - 1)
        return area * rj ** (self.n - 1)

    def a_jet(self, rj):
        """|grad r|^2; identically 1 except on model ends."""
        if self.kind == "exterior" and self.c:
            return 1.0 - self.c / rj
        return Jet.const(1.0, rj.v)

    def laplacian(self, f, rj):
        """Delta f = (1/m)(m a f')' for a jet f of the radial variable."""
        m = self.m_jet(rj)
        a = self.a_jet(rj)
        return a.v * f.d2 + (a.d1 + a.v * m.d1 / m.v) * f.d1


def Interval(length=1.0):
    return DomainSpec("interval", 1, 0.0, float(length))


def RadialBall(n=3, R=1.0):
    return DomainSpec("ball", int(n), 0.0, float(R))


def RadialAnnulus(n=3, a=1.0, b=2.0):
    return DomainSpec("annulus", int(n), float(a), float(b))


def RadialExterior(n=3, r_min=1.0, r_max=1e4, c=0.0):
    return DomainSpec("exterior", int(n), float(r_min), float(r_max), float(c))


@dataclass(frozen=True)
class OperatorSpec:
    """P u = -div(A grad u) + c u, optionally minus a weight (P - W_shift)."""
    coef: Optional[Callable] = None  # jet -> jet, multiplies the domain's a(r)
    potential: Optional[Callable] = None  # jet -> jet
    shift: Optional["WeightSpec"] = None

    def a_jet(self, domain, rj):
        a = domain.a_jet(rj)
        return a if self.coef is None else a * self.coef(rj)

    def apply(self, domain, f, rj):
        """P applied to the jet f; returns values."""
        m = domain.m_jet(rj)
        a = self.a_jet(domain, rj)
        out = -(a.v * f.d2 + (a.d1 + a.v * m.d1 / m.v) * f.d1)
        out = out + self.c_value(domain, rj) * f.v
        return out

    def c_value(self, domain, rj):
        c = 0.0
        if self.potential is not None:
            c = c + self.potential(rj).v
        if self.shift is not None:
            c = c - build_weight(domain, self.shift).jet(rj).v
        return c


LAPLACIAN = OperatorSpec()

FAMILIES = ("InverseSquareDelta", "IteratedLogJ", "IteratedLogW", "ClassicalHardy",
            "RadialOriginH", "Multipolar", "Supersolution", "PowerDelta")


@dataclass(frozen=True)
class WeightSpec:
    family: str
    i: int = 0
    D: Optional[float] = None
    alpha: float = 2.0
    poles: tuple = ()
    pair: Optional["ProfilePair"] = None
    scale: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ScenarioError(f"unknown weight family {self.family!r}")

    @property
    def label(self):
        f = self.family
        if f in ("IteratedLogJ", "IteratedLogW", "RadialOriginH"):
            f = f"{f}(i={self.i},D={self.D!r})"
        elif f == "PowerDelta":
            f = f"PowerDelta(alpha={self.alpha!r})"
        if self.scale != 1.0:
            f = f"{self.scale!r}*{f}"
        return f


@dataclass(frozen=True)
class ProfilePair:
    u0: Callable  # jet -> jet
    u1: Callable
    labels: tuple = ("u0", "u1")


class Weight:
    """Closed-form radial weight with jet evaluation."""

    def __init__(self, domain, spec, jet_fn, singular_ends):
        self.domain = domain
        self.spec = spec
        self._jet = jet_fn
        self.singular_ends = singular_ends

    def jet(self, rj):
        return self._jet(rj)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        self.domain.check_points(r)
        return self._jet(Jet.var(r)).v

    def deriv(self, r):
        r = np.asarray(r, dtype=float)
        self.domain.check_points(r)
        return self._jet(Jet.var(r)).d1


def _prod_sq(i, t):
    """X_0^2 ... X_i^2 (t) for a jet t."""
    p = Jet.const(1.0, t.v)
    y = t
    for _ in range(i):
        y = 1.0 / (1.0 - jets.log(y))
        p = p * y * y
    return p


def _check_D(domain, D, sup):
    if D is None:
        raise ScenarioError("iterated-log weights need the scale D")
    if D < sup * (1.0 - 1e-12):
        raise ScenarioError(f"D = {D} is smaller than sup delta = {sup}")


def build_weight(domain, spec):
    f = spec.family
    k = spec.scale
    if f == "Multipolar":
        raise ScenarioError("multipolar weights are pointwise only; use multipolar_weight")
    if f in ("InverseSquareDelta", "IteratedLogJ", "IteratedLogW", "PowerDelta"):
        if domain.kind == "exterior":
            raise ScenarioError(f"{f} needs a bounded domain with a boundary distance")
        ends = domain.ends()
        if f in ("IteratedLogJ", "IteratedLogW"):
            _check_D(domain, spec.D, domain.delta_max)
            if spec.i < (0 if f == "IteratedLogJ" else -1):
                raise ScenarioError("level out of range")
        if f == "InverseSquareDelta":
            def fn(rj):
                d = domain.delta_jet(rj)
                return k * 0.25 / (d * d)
        elif f == "PowerDelta":
            a = float(spec.alpha)
            if a <= 0:
                ends = ()

            def fn(rj):
                return k * domain.delta_jet(rj) ** (-a)
        elif f == "IteratedLogJ":
            def fn(rj):
                d = domain.delta_jet(rj)
                return k * 0.25 * _prod_sq(spec.i, d / spec.D) / (d * d)
        else:
            def fn(rj):
                d = domain.delta_jet(rj)
                if spec.i < 0:
                    return Jet.const(0.0, rj.v)
                t = d / spec.D
                acc = Jet.const(0.0, rj.v)
                for j in range(spec.i + 1):
                    acc = acc + _prod_sq(j, t)
                return k * 0.25 * acc / (d * d)
        return Weight(domain, spec, fn, ends)
    if f == "ClassicalHardy":
        n = domain.n

        def fn(rj):
            return k * ((n - 2) / 2.0) ** 2 / (rj * rj)
        ends = ("lo", "hi") if domain.kind == "exterior" else ()
        return Weight(domain, spec, fn, ends)
    if f == "RadialOriginH":
        _check_D(domain, spec.D, domain.hi)

        def fn(rj):
            t = rj / spec.D
            acc = Jet.const(0.0, rj.v)
            for j in range(spec.i + 1):
                acc = acc + _prod_sq(j, t)
            return k * 0.25 * acc / (rj * rj)
        return Weight(domain, spec, fn, ())
    if f == "Supersolution":
        if spec.pair is None:
            raise ScenarioError("Supersolution weight needs a profile pair")
        w = supersolution_weight(spec.pair, LAPLACIAN, domain)
        if k != 1.0:
            base = w._jet
            return Weight(domain, spec, lambda rj: k * base(rj), w.singular_ends)
        return Weight(domain, spec, w._jet, w.singular_ends)
    raise ScenarioError(f"unhandled family {f}")


# ---------------------------------------------------------------------------
# profile pairs

def pair_delta(domain, D=1.0):
    """u0 = delta/D, u1 = 1: the pair behind 1/(4 delta^2)."""
    return ProfilePair(lambda rj: domain.delta_jet(rj) / D,
                       lambda rj: Jet.const(1.0, rj.v), ("delta/D", "1"))


def U0_jet(domain, i, D, rj, side=None):
    """U_{0,i} = (t X_0^{-1}...X_i^{-1}(t))^{1/2}, t = delta/D."""
    t = domain.delta_jet(rj, side) / D
    acc = t
    y = t
    for _ in range(i):
        y = 1.0 / (1.0 - jets.log(y))
        acc = acc / y
    return jets.sqrt(acc)


def U1_jet(domain, i, D, rj, side=None):
    t = domain.delta_jet(rj, side) / D
    return U0_jet(domain, i, D, rj, side) / x_jet(i + 1, t)


def pair_iterated(domain, i, D):
    """(U_{0,i}, U_{1,i}); their supersolution weight is J_{i+1}."""
    return ProfilePair(lambda rj: U0_jet(domain, i, D, rj),
                       lambda rj: U1_jet(domain, i, D, rj),
                       (f"U0[{i}]", f"U1[{i}]"))


def pair_exp():
    return ProfilePair(lambda rj: jets.exp(-rj), lambda rj: jets.exp(rj), ("exp(-x)", "exp(x)"))


def pair_power(n):
    """u0 = r^{2-n}, u1 = 1."""
    return ProfilePair(lambda rj: rj ** (2.0 - n), lambda rj: Jet.const(1.0, rj.v),
                       (f"r^{2 - n}", "1"))


def supersolution_weight(pair, op, domain):
    """W(u0,u1) = 1/4 a (d/dr log(u0/u1))^2."""
    def fn(rj):
        u0 = pair.u0(rj)
        u1 = pair.u1(rj)
        if np.any(u0.v <= 0) or np.any(u1.v <= 0):
            raise ScenarioError("profiles must be positive where evaluated")
        g = u0.d1 / u0.v - u1.d1 / u1.v
        a = op.a_jet(domain, rj)
        # derivative of g for the jet (needed by frames)
        g1 = (u0.d2 / u0.v - (u0.d1 / u0.v) ** 2) - (u1.d2 / u1.v - (u1.d1 / u1.v) ** 2)
        w = 0.25 * a.v * g * g
        dw = 0.25 * (a.d1 * g * g + 2.0 * a.v * g * g1)
        return Jet(w, dw, np.full_like(np.asarray(w, dtype=float), np.nan))
    return Weight(domain, WeightSpec("Supersolution", pair=pair), fn, domain.ends())


# ---------------------------------------------------------------------------
# identity checks

@dataclass
class ResidualReport:
    name: str
    points: np.ndarray
    residuals: dict = field(default_factory=dict)  # label -> array of relative residuals
    extra: dict = field(default_factory=dict)

    def max(self, label=None):
        if label is not None:
            return float(np.max(self.residuals[label]))
        return max(float(np.max(v)) for v in self.residuals.values())

    def rows(self):
        labels = list(self.residuals)
        out = []
        for k, r in enumerate(np.atleast_1d(self.points)):
            out.append({"point": float(r), **{lb: float(self.residuals[lb][k]) for lb in labels}})
        return out


def _rel(res, *terms):
    scale = np.zeros_like(np.asarray(res, dtype=float))
    for t in terms:
        scale = np.maximum(scale, np.abs(t))
    scale = np.where(scale > 0, scale, 1.0)
    return np.abs(res) / scale


def verify_supconstruct(pair, op, domain, points):
    """Both ground-state equalities of a supersolution pair, pointwise, relative."""
    r = np.atleast_1d(np.asarray(points, dtype=float))
    domain.check_points(r)
    rj = Jet.var(r)
    u0 = pair.u0(rj)
    u1 = pair.u1(rj)
    V0 = op.apply(domain, u0, rj) / u0.v
    V1 = op.apply(domain, u1, rj) / u1.v
    W = supersolution_weight(pair, op, domain).jet(rj).v
    uh = jets.sqrt(u0 * u1)
    q = u0 / u1
    X1q = 1.0 / (1.0 - jets.log(q))
    Puh = op.apply(domain, uh, rj)
    pot1 = (0.5 * (V0 + V1) + W) * uh.v
    res1 = Puh - pot1
    w2 = uh / X1q
    Pw2 = op.apply(domain, w2, rj)
    pot2 = (0.5 * (V0 + V1) - (V0 - V1) * X1q.v + W) * w2.v
    res2 = Pw2 - pot2
    rep = ResidualReport("supconstruct", r)
    rep.residuals["identity1"] = _rel(res1, Puh, pot1, W * uh.v)
    rep.residuals["identity2"] = _rel(res2, Pw2, pot2, W * w2.v)
    rep.extra.update(V0=V0, V1=V1, W=W)
    return rep


def _H_from_jets(domain, i, D, rj, use_delta=True, side=None):
    """1/4 sum_{k=1}^{i+1} |grad X_k^{-1}(.)|^2 from jet derivatives."""
    base = domain.delta_jet(rj, side) if use_delta else rj
    t = base / D
    a = domain.a_jet(rj).v
    acc = 0.0
    y = t
    for _ in range(i + 1):
        y = 1.0 / (1.0 - jets.log(y))
        inv = 1.0 / y
        acc = acc + a * inv.d1 ** 2
    return 0.25 * acc


def verify_bft_identities(i, D, domain, points, variant="delta"):
    """Residuals of the two iterated-log identities and of H_i = W_i.

    variant "delta" uses t = delta/D; variant "origin" uses t = |x|/D with the
    harmonic factor |x|^{2-n}.
    """
    r = np.atleast_1d(np.asarray(points, dtype=float))
    domain.check_points(r)
    rj = Jet.var(r)
    rep = ResidualReport(f"bft-{variant}", r)
    if variant == "delta":
        domain.check_off_ridge(r)
        if D < domain.delta_max * (1 - 1e-12):
            raise ScenarioError("D must dominate sup delta")
        d = domain.delta_jet(rj)
        ndd = -domain.laplacian(d, rj)  # -Delta delta
        t = d.v / D
        xs = x_all(i + 1, t)
        prods = np.cumprod(np.vstack([np.ones_like(t)] + xs), axis=0)  # P_0..P_{i+1}
        R_i = prods[1:i + 1].sum(axis=0) if i > 0 else np.zeros_like(t)
        H = _H_from_jets(domain, i, D, rj)
        U0 = U0_jet(domain, i, D, rj)
        U1 = U1_jet(domain, i, D, rj)
        lap0 = -domain.laplacian(U0, rj)
        lap1 = -domain.laplacian(U1, rj)
        c0 = ndd / (2.0 * d.v) * (1.0 - R_i)
        c1 = c0 - ndd / d.v * prods[i + 1]
        res1 = lap0 - (c0 + H) * U0.v
        res2 = lap1 - (c1 + H) * U1.v
        rep.residuals["form1"] = _rel(res1, lap0, c0 * U0.v, H * U0.v)
        rep.residuals["form2"] = _rel(res2, lap1, c1 * U1.v, H * U1.v)
        Wi = build_weight(domain, WeightSpec("IteratedLogW", i=i, D=D)).jet(rj).v
        rep.residuals["H_eq_W"] = np.abs(H - Wi) / np.abs(Wi)
        rep.extra.update(R=R_i, minus_lap_delta=ndd)
    elif variant == "origin":
        n = domain.n
        if n < 3:
            raise ScenarioError("the origin variant needs n >= 3")
        if D < domain.hi * (1 - 1e-12):
            raise ScenarioError("D must dominate sup |x|")
        t = rj / D
        acc = rj ** (2.0 - n)
        y = t
        for _ in range(i):
            y = 1.0 / (1.0 - jets.log(y))
            acc = acc / y
        Z = jets.sqrt(acc)
        Z2 = Z / x_jet(i + 1, t)
        H = _H_from_jets(domain, i, D, rj, use_delta=False)
        lap0 = -domain.laplacian(Z, rj)
        lap1 = -domain.laplacian(Z2, rj)
        rep.residuals["form12"] = _rel(lap0 - H * Z.v, lap0, H * Z.v)
        rep.residuals["form22"] = _rel(lap1 - H * Z2.v, lap1, H * Z2.v)
        Hc = build_weight(domain, WeightSpec("RadialOriginH", i=i, D=D)).jet(rj).v
        rep.residuals["H_closed_form"] = np.abs(H - Hc) / np.abs(Hc)
    else:
        raise ScenarioError(f"unknown variant {variant!r}")
    return rep


# ---------------------------------------------------------------------------
# multipolar weights (pointwise, any dimension)

def multipolar_constant(N):
    return N * N / (4.0 * (N - 1))


def multipolar_weight(poles, x):
    P = np.asarray(poles, dtype=float)
    x = np.asarray(x, dtype=float)
    y = x[..., None, :] - P  # (..., N, n)
    d2 = np.sum(y * y, axis=-1)
    N = P.shape[0]
    W = 0.0
    for a in range(N):
        for b in range(a + 1, N):
            W = W + np.sum((P[a] - P[b]) ** 2) / (d2[..., a] * d2[..., b])
    return W


def multipolar_residual(n, poles, x):
    """v = prod |x - x_i|^{(2-n)/N} and the residual of (1/W)(-Delta) v = ((n-2)/N)^2 v."""
    P = np.asarray(poles, dtype=float)
    x = np.asarray(x, dtype=float)
    N = P.shape[0]
    if n < 3 or N < 2 or P.shape[1] != n or x.shape[-1] != n:
        raise ScenarioError("need n >= 3, N >= 2 poles in R^n")
    y = x[..., None, :] - P
    d2 = np.sum(y * y, axis=-1)
    if np.any(d2 == 0):
        raise ScenarioError("x coincides with a pole")
    c = (2.0 - n) / N
    v = np.prod(d2 ** (0.5 * c), axis=-1)
    g = c * np.sum(y / d2[..., None], axis=-2)
    lap_log = c * (n - 2) * np.sum(1.0 / d2, axis=-1)
    lap_v = v * (np.sum(g * g, axis=-1) + lap_log)
    W = multipolar_weight(P, x)
    lam = ((n - 2.0) / N) ** 2
    lhs = -lap_v / W
    res = np.abs(lhs - lam * v) / np.maximum(np.abs(lhs), lam * np.abs(v))
    return {"v": v, "W": W, "residual": res, "eigenvalue": lam,
            "C": multipolar_constant(N), "far_field_exponent": -4}


# ---------------------------------------------------------------------------
# appendix identity

def appendix_identity(n, k, r, D=1.0):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r >= D):
        raise ScenarioError("need 0 < r < D")
    dom = DomainSpec("ball", int(n), 0.0, float(D))
    rj = Jet.var(r)
    t = rj / D
    phi = Jet.const(1.0, r)
    y = t
    for _ in range(k):
        y = 1.0 / (1.0 - jets.log(y))
        phi = phi / jets.sqrt(y)
    lhs = -dom.laplacian(phi, rj) / phi.v
    xs = x_all(k, r / D)
    P = np.cumprod(np.vstack(xs), axis=0)
    s1 = P.sum(axis=0)
    s2 = (P * P).sum(axis=0)
    main = (n - 2) / (2.0 * r * r) * s1
    margin = s2 / (4.0 * r * r)
    rhs = main + margin
    res = np.abs(lhs - rhs) / np.abs(rhs)
    return {"residual": res, "lhs": lhs, "rhs": rhs, "margin": margin,
            "inequality": bool(np.all(lhs >= main * (1 - 1e-14)))}


# ---------------------------------------------------------------------------
# model end

def _fit_slope(x, y):
    lx, ly = np.log(x), np.log(y)
    A = np.vstack([lx, np.ones_like(lx)]).T
    return float(np.linalg.lstsq(A, ly, rcond=None)[0][0])


def model_end_conditions(n, c, r_grid):
    """The three limit conditions for the model end |grad r|^2 = 1 - c/r."""
    r = np.asarray(r_grid, dtype=float)
    if n < 3:
        raise ScenarioError("model ends need n >= 3")
    gam = 1.0 - c / r
    if np.any(gam <= 0) or np.any(gam > 1):
        raise ScenarioError("gradient profile leaves (0, 1]")
    one_m = c / r
    W = ((n - 2) / 2.0) ** 2 / r ** 2
    # V0 from the ground-state identity of r^{(2-n)/2} (see the model-end test)
    V0 = (n - 2) * (n + 2) / 4.0 * one_m / r ** 2
    big = 1.0 + (n - 2) * np.log(r)  # X_1^{-1}(r^{2-n})
    cond1 = np.abs(V0) / W * big
    cond2 = n * (n - 2) * one_m / r ** 2 / W
    limit = (n - 2) / 4.0 * sphere_area(n)
    dens = limit * np.exp((n - 1) * np.log1p(-one_m))
    cond3 = np.abs(np.expm1((n - 1) * np.log1p(-one_m)))
    slopes = {}
    for name, v in (("cond1", cond1), ("cond2", cond2), ("cond3", cond3)):
        slopes[name] = _fit_slope(r, v) if np.all(v > 0) else None
    return {"r": r, "V0": V0, "W": W, "cond1": cond1, "cond2": cond2, "cond3": cond3,
            "density": dens, "density_limit": limit, "slopes": slopes}


def model_end_V0_identity(n, c, r):
    """-Delta f / f - W for f = r^{(2-n)/2} on the model end (jets)."""
    dom = RadialExterior(n, r_min=max(c * 1.0000001, 1e-300), r_max=1e300, c=c)
    rj = Jet.var(np.asarray(r, dtype=float))
    f = rj ** ((2.0 - n) / 2.0)
    W = ((n - 2) / 2.0) ** 2 / rj.v ** 2
    return -dom.laplacian(f, rj) / f.v - W
