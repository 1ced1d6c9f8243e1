"""Graded meshes and conforming P1 assembly of tridiagonal pencils (K, M)."""
import io
from dataclasses import dataclass, field

import numpy as np

from .jets import Jet
from .scenarios import LAPLACIAN, WeightSpec, build_weight, supersolution_weight

QUAD_ORDER = 10
_GX, _GW = np.polynomial.legendre.leggauss(QUAD_ORDER)


class MeshError(ValueError):
    pass


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    q: float = 1.0
    eps_min: float = 0.0
    graded: tuple = ()  # ends with geometric grading
    dirichlet: tuple = (True, True)
    kind: str = ""

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if x.ndim != 1 or x.size < 3:
            raise MeshError("a mesh needs at least 3 nodes")
        if not np.all(np.diff(x) > 0):
            raise MeshError("mesh nodes must be strictly increasing")
        object.__setattr__(self, "nodes", x)

    @property
    def N(self):
        return self.nodes.size

    @property
    def h(self):
        return np.diff(self.nodes)

    def free(self):
        idx = np.arange(self.N)
        keep = np.ones(self.N, dtype=bool)
        keep[0] = not self.dirichlet[0]
        keep[-1] = not self.dirichlet[1]
        return idx[keep]

    def grading_ok(self, slack=1e-12):
        """Adjacent length ratios within [q, 1/q], up to slack plus node rounding."""
        h = self.h
        r = h[1:] / h[:-1]
        # an element of length h at coordinate x is only known to ~ ulp(x)/h
        ulp = np.spacing(np.abs(self.nodes))
        rnd = 4.0 * (ulp[1:-1] + np.maximum(ulp[:-2], ulp[2:])) / np.minimum(h[1:], h[:-1])
        s = slack + rnd
        return bool(np.all((r >= self.q - s) & (r <= 1.0 / self.q + s)))

    def bisect(self):
        """Nested refinement: every element split at its midpoint.

        Halves of one element are equal, so the grading ratio is unchanged.
        """
        x = self.nodes
        y = np.empty(2 * x.size - 1)
        y[0::2] = x
        y[1::2] = 0.5 * (x[:-1] + x[1:])
        return Mesh(y, self.q, self.eps_min, self.graded, self.dirichlet, self.kind)


def _graded_layout(length, n_el, q, eps, n_graded_ends):
    """Element lengths for one graded end: eps, eps/q, ... then uniform.

    Returns (graded lengths, uniform length, number of uniform elements).
    """
    if n_graded_ends == 0 or q == 1.0:
        return [], length / n_el, n_el
    g = []
    while True:
        used = n_graded_ends * sum(g)
        k = n_el - n_graded_ends * len(g)
        if k < 1 or used >= length:
            raise MeshError("N too small to honor eps_min and grading")
        h = (length - used) / k
        if g and g[-1] / q >= h:
            return g, h, k
        if not g and eps >= h:
            return g, h, k
        g.append(eps / q ** len(g))


def make_mesh(domain, N, q=1.0, eps_min=1e-8, singular_ends=None):
    """Nodes on the truncated domain; Dirichlet at the ends, except the ball origin.

    Singular ends are truncated at distance eps_min and graded geometrically
    with ratio 1/q away from it. Model ends and exterior domains use
    log-uniform nodes.
    """
    if N < 3:
        raise MeshError("N must be at least 3")
    if not (0.0 < q <= 1.0):
        raise MeshError("grading ratio must lie in (0, 1]")
    if singular_ends is None:
        singular_ends = domain.ends()
    if domain.kind == "exterior":
        x = np.geomspace(domain.lo, domain.hi, N)
        return Mesh(x, 1.0, 0.0, (), (True, True), domain.kind)
    if not (0.0 < eps_min < 1e-2 * domain.diameter) and singular_ends:
        raise MeshError("eps_min must be positive and below 1e-2 * diameter")
    lo_sing = "lo" in singular_ends and domain.kind != "ball"
    hi_sing = "hi" in singular_ends
    a = domain.lo + (eps_min if lo_sing else 0.0)
    b = domain.hi - (eps_min if hi_sing else 0.0)
    n_el = N - 1
    nge = int(lo_sing) + int(hi_sing)
    # the truncation point itself is at eps_min; grading starts from it
    g, h, k = _graded_layout(b - a, n_el, q, eps_min, nge)
    lens = []
    if lo_sing:
        lens += g
    lens += [h] * k
    if hi_sing:
        lens += g[::-1]
    lens = np.array(lens)
    # accumulate each half from its own endpoint so small elements stay exact
    x_lo = a + np.concatenate([[0.0], np.cumsum(lens)])
    x_hi = b - np.concatenate([[0.0], np.cumsum(lens[::-1])])[::-1]
    half = N // 2
    x = np.concatenate([x_lo[:half], x_hi[half:]])
    if N % 2 and lo_sing and hi_sing:
        x[half] = 0.5 * (a + b)
    dirichlet = (domain.kind != "ball", True)
    return Mesh(x, q, eps_min, tuple(e for e, s in (("lo", lo_sing), ("hi", hi_sing)) if s),
                dirichlet, domain.kind)


@dataclass
class Pencil:
    Kd: np.ndarray
    Ko: np.ndarray
    Md: np.ndarray
    Mo: np.ndarray
    mesh: Mesh
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.Kd.size

    @property
    def coords(self):
        return self.mesh.nodes[self.mesh.free()]

    def dense(self):
        K = np.diag(self.Kd) + np.diag(self.Ko, 1) + np.diag(self.Ko, -1)
        M = np.diag(self.Md) + np.diag(self.Mo, 1) + np.diag(self.Mo, -1)
        return K, M

    def apply_K(self, x):
        return _tri_mul(self.Kd, self.Ko, x)

    def apply_M(self, x):
        return _tri_mul(self.Md, self.Mo, x)

    def rayleigh(self, x):
        return float(x @ self.apply_K(x) / (x @ self.apply_M(x)))

    def to_text(self):
        out = io.StringIO()
        m = self.mesh
        out.write(f"# scenario={self.meta.get('scenario', '')}\n")
        out.write(f"# weight={self.meta.get('weight', '')}\n")
        out.write(f"# frame={bool(self.meta.get('frame', False))}\n")
        out.write(f"# N={m.N}\n# q={float(m.q)!r}\n# eps_min={float(m.eps_min)!r}\n")
        out.write(f"# dirichlet={int(m.dirichlet[0])},{int(m.dirichlet[1])}\n")
        out.write(f"# kind={m.kind}\n# graded={','.join(m.graded)}\n")
        out.write("node,Kdiag,Koff,Mdiag,Moff\n")
        free = m.free()
        fset = set(free.tolist())
        row = {j: k for k, j in enumerate(free)}
        for j, x in enumerate(m.nodes):
            if j in fset:
                k = row[j]
                ko = self.Ko[k] if k < self.n - 1 else 0.0
                mo = self.Mo[k] if k < self.n - 1 else 0.0
                out.write(",".join(repr(float(c)) for c in (x, self.Kd[k], ko, self.Md[k], mo)) + "\n")
            else:
                out.write(f"{float(x)!r},,,,\n")
        return out.getvalue()

    @classmethod
    def from_text(cls, text):
        head = {}
        rows = []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                head[k] = v
            elif line.startswith("node") or not line.strip():
                continue
            else:
                rows.append(line.split(","))
        nodes = np.array([float(r[0]) for r in rows])
        vals = [r for r in rows if r[1] != ""]
        arr = np.array([[float(c) for c in r[1:]] for r in vals]).reshape(-1, 4)
        d = tuple(bool(int(c)) for c in head["dirichlet"].split(","))
        graded = tuple(g for g in head.get("graded", "").split(",") if g)
        mesh = Mesh(nodes, float(head["q"]), float(head["eps_min"]), graded, d, head.get("kind", ""))
        meta = {"scenario": head.get("scenario", ""), "weight": head.get("weight", ""),
                "frame": head.get("frame") == "True"}
        return cls(arr[:, 0], arr[:-1, 1], arr[:, 2], arr[:-1, 3], mesh, meta)


def _tri_mul(d, o, x):
    y = d * x
    y[:-1] += o * x[1:]
    y[1:] += o * x[:-1]
    return y


def _quad_points(nodes, breaks=()):
    """Gauss points per element, splitting elements that contain a break point.

    Returns (element index, points, weights) flattened.
    """
    a = nodes[:-1]
    b = nodes[1:]
    segs = [(a, b, np.arange(a.size))]
    for c in breaks:
        inside = np.nonzero((a < c) & (c < b))[0]
        if inside.size:
            base_a, base_b, base_e = segs[0]
            keep = np.ones(base_a.size, dtype=bool)
            keep[inside] = False
            segs = [(base_a[keep], base_b[keep], base_e[keep]),
                    (a[inside], np.full(inside.size, c), inside),
                    (np.full(inside.size, c), b[inside], inside)] + segs[1:]
    E, X, Wq = [], [], []
    for sa, sb, se in segs:
        mid = 0.5 * (sa + sb)
        half = 0.5 * (sb - sa)
        X.append(mid[:, None] + half[:, None] * _GX[None, :])
        Wq.append(half[:, None] * _GW[None, :])
        E.append(np.repeat(se[:, None], QUAD_ORDER, axis=1))
    return np.concatenate(E).ravel(), np.concatenate(X).ravel(), np.concatenate(Wq).ravel()


def assemble_1d(mesh, stiff, pot, mass, breaks=(), point_terms=(), lumped=False):
    """P1 pencil for K = int p f'^2 + int c f^2 (+ point terms), M = int w f^2.

    stiff, pot, mass map an array of points to densities (pot may be None).
    point_terms: (x0, coefficient) pairs adding coefficient * f(x0)^2 to K.
    """
    x = mesh.nodes
    h = np.diff(x)
    ne = h.size
    e, pts, wq = _quad_points(x, breaks)
    p = np.asarray(stiff(pts), dtype=float) * np.ones_like(pts)
    w = np.asarray(mass(pts), dtype=float) * np.ones_like(pts)
    c = np.zeros_like(pts) if pot is None else np.asarray(pot(pts), dtype=float) * np.ones_like(pts)
    for arr, nm in ((p, "stiffness"), (w, "weight"), (c, "potential")):
        if not np.all(np.isfinite(arr)):
            raise AssemblyError(f"{nm} evaluation failed inside an element")
    if np.any(w < 0):
        raise AssemblyError("weight must be nonnegative")
    t = (pts - x[e]) / h[e]  # local coordinate
    phi0 = 1.0 - t
    phi1 = t
    # element integrals: stiffness, then zeroth order parts
    Sp = np.bincount(e, wq * p, ne) / h ** 2
    def z(dens):
        return (np.bincount(e, wq * dens * phi0 * phi0, ne),
                np.bincount(e, wq * dens * phi0 * phi1, ne),
                np.bincount(e, wq * dens * phi1 * phi1, ne))
    c00, c01, c11 = z(c)
    m00, m01, m11 = z(w)
    Kd = np.zeros(ne + 1)
    Ko = np.zeros(ne)
    Md = np.zeros(ne + 1)
    Mo = np.zeros(ne)
    Kd[:-1] += Sp + c00
    Kd[1:] += Sp + c11
    Ko += -Sp + c01
    if lumped:
        Md[:-1] += m00 + m01
        Md[1:] += m11 + m01
    else:
        Md[:-1] += m00
        Md[1:] += m11
        Mo += m01
    for x0, coef in point_terms:
        j = int(np.searchsorted(x, x0))
        if j < x.size and x[j] == x0:
            Kd[j] += coef
        else:
            j -= 1
            t0 = (x0 - x[j]) / h[j]
            Kd[j] += coef * (1 - t0) ** 2
            Kd[j + 1] += coef * t0 ** 2
            Ko[j] += coef * t0 * (1 - t0)
    free = mesh.free()
    lo, hi = free[0], free[-1]
    return Kd[lo:hi + 1].copy(), Ko[lo:hi].copy(), Md[lo:hi + 1].copy(), Mo[lo:hi].copy()


def _ridge_breaks(domain):
    r = domain.ridge
    return () if r is None or r <= domain.lo else (r,)


def _weight_obj(domain, weight):
    if weight is None:
        return None
    if isinstance(weight, WeightSpec):
        return build_weight(domain, weight)
    return weight


def assemble_pencil(domain, op=LAPLACIAN, weight=None, mesh=None, bc="dirichlet", lumped=False,
                    scenario="", validate=True):
    """Pencil of q(u) against int W u^2 dnu on P1 functions of the mesh.

    weight None means W = 1. Every density is evaluated exactly at the
    quadrature points, so discrete Rayleigh quotients are continuum
    quotients of the interpolants.
    """
    if bc != "dirichlet":
        raise AssemblyError("only Dirichlet truncation is supported")
    if mesh is None:
        raise AssemblyError("a mesh is required")
    W = _weight_obj(domain, weight)

    def stiff(r):
        rj = Jet.var(r)
        return domain.m_jet(rj).v * op.a_jet(domain, rj).v

    def pot(r):
        rj = Jet.var(r)
        return domain.m_jet(rj).v * op.c_value(domain, rj)

    def mass(r):
        rj = Jet.var(r)
        wv = 1.0 if W is None else W.jet(rj).v
        return domain.m_jet(rj).v * wv

    has_pot = op.potential is not None or op.shift is not None
    Kd, Ko, Md, Mo = assemble_1d(mesh, stiff, pot if has_pot else None, mass,
                                 _ridge_breaks(domain), lumped=lumped)
    meta = {"scenario": scenario, "weight": "1" if W is None else W.spec.label, "frame": False}
    pen = Pencil(Kd, Ko, Md, Mo, mesh, meta)
    _check_mass(pen)
    if validate and has_pot:
        from .eigen import inertia
        scale = max(1.0, float(np.max(np.abs(Kd))))
        neg = inertia(pen, -1e-9 * scale / float(np.max(Md))).count
        pen.meta["negative_modes"] = neg
    return pen


def _check_mass(pen):
    d = pen.Md.copy()
    piv = d[0]
    if piv <= 0:
        raise AssemblyError("indefinite mass matrix")
    for k in range(1, d.size):
        piv = d[k] - pen.Mo[k - 1] ** 2 / piv
        if not piv > 0:
            raise AssemblyError("indefinite mass matrix")


def assemble_groundstate_frame(pair, op=LAPLACIAN, weight=None, mesh=None, domain=None,
                               scenario="", lumped=False):
    """Pencil of L = u_half^{-1}(W^{-1}P - 1)u_half on the same P1 space.

    With u = u_half f the frame form is int a m u_half^2 f'^2 + int V W u^2 m,
    V = (V0 + V1)/(2W); mass int W u^2 m. Kinks of the profiles (the ridge)
    contribute a point term from the distributional part of P u_half.
    """
    if domain is None or mesh is None:
        raise AssemblyError("domain and mesh are required")
    W = _weight_obj(domain, weight) or supersolution_weight(pair, op, domain)
    rid = _ridge_breaks(domain)

    def profiles(r):
        rj = Jet.var(r)
        u0 = pair.u0(rj)
        u1 = pair.u1(rj)
        return rj, u0, u1

    def stiff(r):
        # element-wise: the trial function f = u/u_half is handled by the
        # transformed stiffness below, so here only the density is returned
        rj, u0, u1 = profiles(r)
        uh2 = u0.v * u1.v
        if np.any(uh2 <= 0):
            raise AssemblyError("u_half vanishes on the mesh")
        return domain.m_jet(rj).v * op.a_jet(domain, rj).v * uh2

    def Vterm(r):
        rj, u0, u1 = profiles(r)
        V0 = op.apply(domain, u0, rj) / u0.v
        V1 = op.apply(domain, u1, rj) / u1.v
        return domain.m_jet(rj).v * 0.5 * (V0 + V1)

    def mass(r):
        rj = Jet.var(r)
        return domain.m_jet(rj).v * W.jet(rj).v

    x = mesh.nodes
    h = np.diff(x)
    ne = h.size
    e, pts, wq = _quad_points(x, rid)
    rj, u0, u1 = profiles(pts)
    uh = np.sqrt(u0.v * u1.v)
    if np.any(~(uh > 0)):
        raise AssemblyError("u_half vanishes on the mesh")
    g = 0.5 * (u0.d1 / u0.v + u1.d1 / u1.v)  # u_half'/u_half
    p = stiff(pts)  # a m u_half^2
    t = (pts - x[e]) / h[e]
    # (phi/u_half)' = (phi' - phi g)/u_half
    d0 = (-1.0 / h[e] - (1.0 - t) * g) / uh
    d1 = (1.0 / h[e] - t * g) / uh
    V = Vterm(pts)
    w = mass(pts)
    phi0, phi1 = 1.0 - t, t
    k00 = np.bincount(e, wq * (p * d0 * d0 + V * phi0 * phi0), ne)
    k01 = np.bincount(e, wq * (p * d0 * d1 + V * phi0 * phi1), ne)
    k11 = np.bincount(e, wq * (p * d1 * d1 + V * phi1 * phi1), ne)
    m00 = np.bincount(e, wq * w * phi0 * phi0, ne)
    m01 = np.bincount(e, wq * w * phi0 * phi1, ne)
    m11 = np.bincount(e, wq * w * phi1 * phi1, ne)
    Kd = np.zeros(ne + 1)
    Md = np.zeros(ne + 1)
    Kd[:-1] += k00
    Kd[1:] += k11
    Ko = k01.copy()
    if lumped:
        Md[:-1] += m00 + m01
        Md[1:] += m11 + m01
        Mo = np.zeros(ne)
    else:
        Md[:-1] += m00
        Md[1:] += m11
        Mo = m01.copy()
    for r0 in rid:
        # point term -a m [jump of u_half'/u_half] at the kink
        eps = 1e-9 * max(1.0, abs(r0))
        rl = Jet.var(np.array([r0 - eps, r0 + eps]))
        a0 = pair.u0(rl)
        a1 = pair.u1(rl)
        gl = 0.5 * (a0.d1 / a0.v + a1.d1 / a1.v)
        jump = gl[1] - gl[0]
        r0j = Jet.var(np.array(r0))
        coef = -float(domain.m_jet(r0j).v * op.a_jet(domain, r0j).v) * jump
        if abs(coef) > 0:
            j = int(np.searchsorted(x, r0))
            if x[j] == r0:
                Kd[j] += coef
            else:
                j -= 1
                t0 = (r0 - x[j]) / h[j]
                Kd[j] += coef * (1 - t0) ** 2
                Kd[j + 1] += coef * t0 ** 2
                Ko[j] += coef * t0 * (1 - t0)
    free = mesh.free()
    lo, hi = free[0], free[-1]
    meta = {"scenario": scenario, "weight": W.spec.label, "frame": True}
    pen = Pencil(Kd[lo:hi + 1].copy(), Ko[lo:hi].copy(), Md[lo:hi + 1].copy(), Mo[lo:hi].copy(),
                 mesh, meta)
    _check_mass(pen)
    return pen
