"""Named scenarios: domain, operator, weight, frame and the spectral values they should show."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quasimode import JetEnd, Frame, flat_frame, iterated_log_frame
from .scenarios import (LAPLACIAN, OperatorSpec, ProfilePair, ScenarioError, WeightSpec,
                        Interval, RadialAnnulus, RadialBall, RadialExterior, build_weight,
                        pair_delta, pair_iterated, pair_power, sphere_area)
from .xlog import select_D


@dataclass
class Scenario:
    name: str
    domain: object
    weight: Optional[WeightSpec]
    op: OperatorSpec = LAPLACIAN
    pair: Optional[ProfilePair] = None
    frame_fn: Optional[Callable] = None
    lam0: Optional[float] = None  # expected bottom of the spectrum
    lam_ess: Optional[float] = None  # expected bottom of the essential spectrum
    mesh: dict = field(default_factory=dict)
    pointwise: bool = False
    poles: tuple = ()

    def frame(self):
        if self.frame_fn is None:
            raise ScenarioError(f"scenario {self.name} has no frame")
        return self.frame_fn()

    def weight_obj(self):
        if self.pointwise:
            raise ScenarioError(f"{self.name} is a pointwise scenario")
        return None if self.weight is None else build_weight(self.domain, self.weight)


def _iter_op(i, D):
    if i == 0:
        return LAPLACIAN
    return OperatorSpec(shift=WeightSpec("IteratedLogW", i=i - 1, D=D))


def _interval_delta2():
    dom = Interval(1.0)
    return Scenario("interval-delta2", dom, WeightSpec("PowerDelta", alpha=2.0), pair=pair_delta(dom),
                    frame_fn=lambda: iterated_log_frame(dom, 0, 1.0, 4.0, "interval-delta2"),
                    lam0=0.25, lam_ess=0.25, mesh={"N": 801, "q": 0.8, "eps_min": 1e-8})


def _iterated(kind, i):
    if kind == "interval":
        dom, dmax = Interval(1.0), 0.5
    else:
        dom, dmax = RadialBall(3, 1.0), 1.0
    D = 1.0 if i == 0 else select_D(dmax, i)
    name = f"{kind}-j{i}" if kind == "interval" else f"ball3-j{i}"
    return Scenario(name, dom, WeightSpec("IteratedLogJ", i=i, D=D), op=_iter_op(i, D),
                    pair=pair_iterated(dom, i - 1, D) if i > 0 else pair_delta(dom, D),
                    frame_fn=lambda: iterated_log_frame(dom, i, D, 1.0, name),
                    lam0=1.0, lam_ess=1.0, mesh={"N": 801, "q": 0.8, "eps_min": 1e-8})


def _annulus():
    dom = RadialAnnulus(3, 1.0, 2.0)
    return Scenario("annulus3-delta2", dom, WeightSpec("PowerDelta", alpha=2.0), pair=pair_delta(dom),
                    frame_fn=lambda: iterated_log_frame(dom, 0, 1.0, 4.0, "annulus3-delta2"),
                    lam0=None, lam_ess=0.25, mesh={"N": 801, "q": 0.8, "eps_min": 1e-8})


def multipolar_density(n, poles):
    """Frame density of each far end for two poles: (n-2)/2 |S^{n-1}| |x1 - x2|^{2-n}."""
    d = float(np.linalg.norm(np.asarray(poles[0]) - np.asarray(poles[1])))
    return 0.5 * (n - 2) * sphere_area(n) * d ** (2 - n)


def _multipolar():
    n = 3
    poles = ((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0))
    k = 4.0 / (n - 2) ** 2
    dens = multipolar_density(n, poles)
    return Scenario("multipolar-2p-n3", None, WeightSpec("Multipolar", poles=poles),
                    frame_fn=lambda: flat_frame(dens, k, "multipolar-2p-n3"),
                    lam0=(n - 2) ** 2 / 4.0, lam_ess=(n - 2) ** 2 / 4.0, pointwise=True, poles=poles)


def _model_end(c):
    n = 3
    r_min = 1.0 if c == 0 else 2.0 * c
    dom = RadialExterior(n, r_min, 1e4, c)
    lam = ((n - 2) / 2.0) ** 2
    name = f"modelend-n{n}-c{c:g}"
    if c == 0:
        # u0/u1 = r^{2-n}: s = 1/2 + (n-2)/2 log r, chi constant
        dens = sphere_area(n) * (n - 2) / 2.0
        frame_fn = lambda: flat_frame(dens, 1.0 / lam, name, s_min=0.5 + 0.5 * (n - 2) * np.log(r_min))
    else:
        pair = pair_power(n)
        fw = build_weight(dom, WeightSpec("ClassicalHardy"))

        def frame_fn():
            end = JetEnd(dom, pair, LAPLACIAN, fw, r_of_y=np.exp, y_range=(np.log(r_min), 150.0))
            return Frame([end], 1.0 / lam, name)
    return Scenario(name, dom, WeightSpec("ClassicalHardy", scale=1.0 / lam), pair=pair_power(n),
                    frame_fn=frame_fn, lam0=lam, lam_ess=lam,
                    mesh={"N": 2001, "q": 1.0, "eps_min": 0.0})


def _power3():
    dom = Interval(1.0)
    return Scenario("interval-power3", dom, WeightSpec("PowerDelta", alpha=3.0),
                    lam0=0.0, lam_ess=None, mesh={"N": 801, "q": 0.8, "eps_min": 1e-8})


_BUILDERS = {
    "interval-delta2": _interval_delta2,
    "interval-j0": lambda: _iterated("interval", 0),
    "interval-j1": lambda: _iterated("interval", 1),
    "interval-j2": lambda: _iterated("interval", 2),
    "ball3-j1": lambda: _iterated("ball", 1),
    "ball3-j2": lambda: _iterated("ball", 2),
    "annulus3-delta2": _annulus,
    "multipolar-2p-n3": _multipolar,
    "modelend-n3-c0": lambda: _model_end(0),
    "modelend-n3-c1": lambda: _model_end(1),
    "interval-power3": _power3,
}

ALIASES = {"interval": "interval-delta2", "ball": "ball3-j1", "annulus": "annulus3-delta2",
           "multipolar": "multipolar-2p-n3", "modelend": "modelend-n3-c0"}

NAMES = tuple(_BUILDERS)

# weight overrides accepted by name, with the Hardy constant in W units
WEIGHT_NAMES = {
    "inverse-square-delta": (WeightSpec("InverseSquareDelta"), 1.0),
    "delta2": (WeightSpec("PowerDelta", alpha=2.0), 0.25),
    "power3": (WeightSpec("PowerDelta", alpha=3.0), 0.0),
}


def get(name):
    key = ALIASES.get(name, name)
    if key not in _BUILDERS:
        raise ScenarioError(f"unknown scenario {name!r}; known: {', '.join(NAMES)}")
    return _BUILDERS[key]()


def with_weight(sc, weight_name):
    """Copy of a scenario with a named weight; lam0 follows the weight."""
    if weight_name not in WEIGHT_NAMES:
        raise ScenarioError(f"unknown weight {weight_name!r}; known: {', '.join(WEIGHT_NAMES)}")
    spec, lam0 = WEIGHT_NAMES[weight_name]
    if sc.domain is None or sc.domain.kind == "exterior":
        raise ScenarioError("boundary-distance weights need a bounded domain")
    if sc.domain.kind == "annulus":
        lam0 = None  # not convex: the boundary-distance constant is not known
    return Scenario(sc.name, sc.domain, spec, mesh=dict(sc.mesh), lam0=lam0,
                    lam_ess=WEIGHT_NAMES[weight_name][1] or None)
