import math

import numpy as np
import pytest

from hardyspec import catalog
from hardyspec.measures_agmon import density_measure, growth_criterion
from hardyspec.quasimode import (Cutoff, IteratedLogEnd, JetEnd, QuasimodeError, Window,
                                 ess_spectrum_probe, far_field_bump, quasimode_residual,
                                 quasimode_residual_direct, ramp_for, schedule, transfer_residual,
                                 window_search)
from hardyspec.scenarios import (OperatorSpec, RadialBall, WeightSpec, build_weight, pair_delta,
                                 pair_iterated)
from hardyspec.xlog import select_D


def test_window_validation_and_ramp():
    with pytest.raises(QuasimodeError):
        Window(0.0, 1.0, 1.0)
    with pytest.raises(QuasimodeError):
        Window(0.0, 10.0, 0.0)
    assert ramp_for(1.0) == 0.5
    assert ramp_for(100.0) == 15.0
    assert ramp_for(0.1) == 0.05


def test_cutoff_shape_and_derivative_bounds():
    w = Window(3.0, 13.0, 2.0)
    v = np.linspace(0.0, 16.0, 200001)
    p0, p1, p2 = Cutoff(w)(v)
    assert np.all((p0 >= 0) & (p0 <= 1))
    assert np.all(p0[(v >= 5) & (v <= 11)] == 1.0)
    assert np.all(p0[(v <= 3) | (v >= 13)] == 0.0)
    # sympy maxima of the quintic smoothstep: 15/8 and 10/sqrt(3)
    assert np.max(np.abs(p1)) * w.ramp == pytest.approx(15 / 8, rel=1e-8)
    assert np.max(np.abs(p2)) * w.ramp ** 2 == pytest.approx(10 / math.sqrt(3), rel=1e-6)
    # derivatives agree with finite differences of psi
    h = v[1] - v[0]
    assert np.allclose(np.gradient(p0, h)[1:-1], p1[1:-1], atol=1e-6)


def _ball_frames(i):
    dom = RadialBall(3, 1.0)
    D = select_D(1.0, i) if i else 1.0
    il = IteratedLogEnd(dom, "hi", i, D)
    pair = pair_iterated(dom, i - 1, D) if i else pair_delta(dom, D)
    op = OperatorSpec(shift=WeightSpec("IteratedLogW", i=i - 1, D=D)) if i else OperatorSpec()
    W = build_weight(dom, WeightSpec("IteratedLogJ", i=i, D=D))
    je = JetEnd(dom, pair, op, W, r_of_y=lambda y: 1.0 - np.exp(-y), y_range=(0.05, 30.0))
    return il, je


@pytest.mark.parametrize("i,s", [(0, [1.0, 3.0, 8.0]), (1, [0.6, 0.8, 0.9])])
def test_closed_form_frame_matches_jets(i, s):
    il, je = _ball_frames(i)
    s = np.array(s)
    for name in ("chi", "Ls", "G", "V"):
        assert np.allclose(getattr(il, name)(s), getattr(je, name)(s), rtol=1e-8, atol=1e-14)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_jet_end_rejects_unrepresented_s():
    _, je = _ball_frames(1)
    with pytest.raises(QuasimodeError):
        je.chi(np.array([je.s_max + 1.0]))


@pytest.mark.parametrize("eta", [0.0, 1.0, 3.0])
def test_frame_residual_matches_direct_interval(eta):
    sc = catalog.get("interval-delta2")
    fr = sc.frame()
    w = Window(4.0, 44.0, ramp_for(40.0))
    a = quasimode_residual(fr, eta, w).scenario_ratio
    b = quasimode_residual_direct(sc.domain, sc.pair, sc.weight_obj(), eta, w,
                                  lambda s: np.exp(1.0 - 2.0 * s), sc.op, fr.k_scale)
    assert a == pytest.approx(b, rel=1e-9)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_frame_residual_matches_direct_ball_level_one():
    sc = catalog.get("ball3-j1")
    fr = sc.frame()
    D = fr.ends[0].D

    def r_of_s(s):
        x1 = np.exp(1.0 - 2.0 * s)
        return 1.0 - D * np.exp(1.0 - 1.0 / x1)

    w = Window(1.2, 4.2, 1.0)
    for eta in (0.0, 1.0):
        a = quasimode_residual(fr, eta, w).scenario_ratio
        b = quasimode_residual_direct(sc.domain, sc.pair, sc.weight_obj(), eta, w, r_of_s, sc.op,
                                      fr.k_scale)
        assert a == pytest.approx(b, rel=1e-8)


def test_residual_below_bound_and_halving():
    fr = catalog.get("interval-j0").frame()
    for eta in (0.0, 1.0, 3.0):
        rs = []
        for L in (200.0, 400.0, 800.0):
            res = quasimode_residual(fr, eta, Window(2.0, 2.0 + L, ramp_for(L)))
            assert res.ratio <= res.bound
            rs.append(res.ratio)
        # ramp ~ sqrt(L): ratio decays roughly like L^{-3/4}
        assert all(0.4 <= rs[k + 1] / rs[k] <= 0.65 for k in range(2))


def test_negative_eta_rejected():
    fr = catalog.get("interval-j0").frame()
    with pytest.raises(QuasimodeError):
        quasimode_residual(fr, -0.5, Window(2.0, 102.0, 10.0))
    with pytest.raises(QuasimodeError):
        ess_spectrum_probe(fr, [-0.1])


def test_probe_certifies_and_serializes():
    fr = catalog.get("interval-delta2").frame()
    ws = schedule(fr, (100.0, 200.0, 400.0, 800.0))
    rep = ess_spectrum_probe(fr, [0.0, 1.0], ws, tol=0.05)
    assert rep.certified()
    assert all(v["slope"] < 0 for v in rep.summary.values())
    assert rep.persson["V_to_zero"]
    import json
    doc = json.loads(rep.to_json())
    assert set(doc) == {"scenario", "tol", "rows", "summary", "persson"}
    head = rep.to_csv().splitlines()[0]
    assert head == "scenario,eta,a,b,ramp,ratio,bulk_Lv,grad_defect,cutoff1,cutoff2,potential,certified"
    assert len(rep.to_csv().splitlines()) == len(rep.rows) + 1


def test_transfer_bound():
    fr = catalog.get("interval-delta2").frame()
    w = schedule(fr, (200.0,))[0]
    beta = far_field_bump(0.25 * (w.a + w.b), 10.0, 0.05)
    for lam in (1.0, 2.0):
        r1, bound, r2 = transfer_residual(fr, lam, w, beta)
        assert r2 <= bound * (1 + 1e-12)
        assert r2 <= 2.0 * r1 + lam * 0.05
    with pytest.raises(QuasimodeError):
        transfer_residual(fr, 0.1, w, beta)


def test_window_search_uniform_and_obstruction():
    flat = density_measure(np.ones_like, np.arange(0.0, 101.0))
    assert window_search(flat, 10.0, 0.1, 5.0) == (20.0, pytest.approx(0.1))
    steep = density_measure(lambda t: np.exp(2.0 * t), np.arange(0.0, 101.0))
    row = growth_criterion(steep, 10.0, 5.0, 0.1)
    assert row["b"] is None and row["verdict"] == "growth obstruction"
    assert row["ratio"] == pytest.approx(math.e ** 2 - 1, rel=1e-6)


def test_unit_ramp_boundary_values_and_minimal_window():
    w = Window(0.0, 2.0, 1.0)
    p0, p1, p2 = Cutoff(w)(np.array([0.0, 1.0, 2.0]))
    assert list(p0) == [0.0, 1.0, 0.0]
    assert np.all(p1 == 0.0)
    v = np.linspace(0.0, 2.0, 2001)
    assert np.count_nonzero(Cutoff(w)(v)[0] == 1.0) == 1


def test_flat_frame_has_only_cutoff_terms():
    fr = catalog.get("multipolar-2p-n3").frame()
    res = quasimode_residual(fr, 0.0, Window(2.0, 102.0, 10.0))
    assert res.terms["bulk_Lv"] == 0.0 and res.terms["grad_defect"] == 0.0
    assert res.terms["potential"] == 0.0 and res.terms["cutoff1"] > 0.0


def test_interval_level_zero_probe_slopes():
    fr = catalog.get("interval-j0").frame()
    rep = ess_spectrum_probe(fr, [0.0, 1.0, 3.0], schedule(fr, (100.0, 200.0, 400.0, 800.0)),
                             tol=0.02, extend_to=12800.0)
    assert rep.certified()
    for v in rep.summary.values():
        assert -1.3 <= v["slope"] <= -0.7
