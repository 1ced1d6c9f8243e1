import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyspec.jets import Jet
from hardyspec.scenarios import (LAPLACIAN, Interval, RadialAnnulus, RadialBall, RadialExterior,
                                 ScenarioError, WeightSpec, appendix_identity, build_weight,
                                 model_end_conditions, model_end_V0_identity, multipolar_constant,
                                 multipolar_residual, multipolar_weight, pair_delta, pair_exp,
                                 pair_iterated, pair_power, sphere_area, supersolution_weight,
                                 verify_bft_identities, verify_supconstruct)
from hardyspec.xlog import select_D

D_ALL = select_D(1.0, "all")


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi ** 2)


def test_domain_validation():
    with pytest.raises(ScenarioError):
        RadialExterior(3, r_min=1.0, c=1.0)
    with pytest.raises(ScenarioError):
        Interval(0.0)
    dom = Interval(1.0)
    with pytest.raises(ScenarioError):
        dom.check_points(np.array([1.2]))
    with pytest.raises(ScenarioError):
        dom.check_off_ridge(np.array([0.5]))


def test_iterated_weight_closed_form():
    # sympy: (1 + X_1^2)/(4 delta^2) at delta = 0.2, D = 1
    W = build_weight(Interval(1.0), WeightSpec("IteratedLogW", i=1, D=1.0))
    assert W(np.array([0.2]))[0] == pytest.approx(7.1678803687739904, rel=1e-14)


def test_interval_profiles_match_sympy():
    # -U0''/U0 = -U1''/U1 = W_1 on the interval (delta is harmonic there)
    dom = Interval(1.0)
    pair = pair_iterated(dom, 1, 1.0)
    rj = Jet.var(np.array([0.2]))
    for u in (pair.u0(rj), pair.u1(rj)):
        assert (-u.d2 / u.v)[0] == pytest.approx(7.1678803687739904, rel=1e-12)


def test_weight_requires_large_D():
    with pytest.raises(ScenarioError):
        build_weight(Interval(1.0), WeightSpec("IteratedLogJ", i=1, D=0.4))
    with pytest.raises(ScenarioError):
        build_weight(RadialBall(3, 1.0), WeightSpec("RadialOriginH", i=1, D=0.5))
    with pytest.raises(ScenarioError):
        build_weight(Interval(1.0), WeightSpec("Multipolar"))
    with pytest.raises(ScenarioError):
        WeightSpec("Nope")


def test_inverse_square_equals_level_zero():
    dom = Interval(1.0)
    r = np.linspace(0.01, 0.49, 7)
    a = build_weight(dom, WeightSpec("InverseSquareDelta"))(r)
    b = build_weight(dom, WeightSpec("IteratedLogJ", i=0, D=1.0))(r)
    c = build_weight(dom, WeightSpec("IteratedLogW", i=0, D=1.0))(r)
    assert np.allclose(a, b, rtol=1e-15) and np.allclose(a, c, rtol=1e-15)
    z = build_weight(dom, WeightSpec("IteratedLogW", i=-1, D=1.0))(r)
    assert np.all(z == 0)


def test_pair_weights():
    dom = Interval(1.0)
    r = np.array([0.05, 0.3])
    W = supersolution_weight(pair_delta(dom), LAPLACIAN, dom)(r)
    assert np.allclose(W, 0.25 / dom.delta(r) ** 2, rtol=1e-14)
    for i in (1, 2):
        D = select_D(0.5, "all")
        Wp = supersolution_weight(pair_iterated(dom, i - 1, D), LAPLACIAN, dom)(r)
        J = build_weight(dom, WeightSpec("IteratedLogJ", i=i, D=D))(r)
        assert np.allclose(Wp, J, rtol=1e-13)


def test_supconstruct_identities():
    dom = Interval(1.0)
    r = np.array([0.01, 0.1, 0.3, 0.45, 0.7])
    assert verify_supconstruct(pair_delta(dom), LAPLACIAN, dom, r).max() < 1e-12
    ext = RadialExterior(3, 1.0, 1e3)
    assert verify_supconstruct(pair_power(3), LAPLACIAN, ext, np.geomspace(1.5, 900, 9)).max() < 1e-12
    assert verify_supconstruct(pair_exp(), LAPLACIAN, Interval(3.0), np.array([0.5, 1.0])).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.002, 0.498), st.integers(0, 3), st.sampled_from(["interval", "ball", "annulus"]))
def test_bft_identities_property(u, i, kind):
    if kind == "interval":
        dom, r = Interval(1.0), u
    elif kind == "ball":
        dom, r = RadialBall(3, 1.0), 0.005 + 1.98 * u
    else:
        dom, r = RadialAnnulus(3, 1.0, 2.0), 1.0 + u
    rep = verify_bft_identities(i, D_ALL * dom.delta_max, dom, np.array([r]))
    assert rep.max() < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-5, 0.999), st.integers(0, 3))
def test_bft_origin_variant(r, i):
    rep = verify_bft_identities(i, D_ALL, RadialBall(3, 1.0), np.array([r]), "origin")
    assert rep.max() < 1e-8


def test_bft_rejects_ridge_and_small_D():
    with pytest.raises(ScenarioError):
        verify_bft_identities(1, 1.0, Interval(1.0), np.array([0.5]))
    with pytest.raises(ScenarioError):
        verify_bft_identities(1, 0.3, Interval(1.0), np.array([0.2]))


def test_multipolar_matches_sympy():
    P = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    x = np.array([0.3, 0.4, 0.5])
    out = multipolar_residual(3, P, x)
    assert out["W"] == pytest.approx(2.1164021164021164, rel=1e-14)
    assert out["v"] == pytest.approx(0.85287335956360364, rel=1e-14)
    assert out["eigenvalue"] == 0.25
    assert out["residual"] < 1e-13
    assert multipolar_constant(2) == 1.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_multipolar_three_poles(x):
    P = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0]])
    x = np.array(x)
    if np.min(np.linalg.norm(P - x, axis=1)) < 0.05:
        return
    assert multipolar_residual(3, P, x)["residual"] < 1e-8


def test_multipolar_far_field():
    P = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    d = np.array([0.6, 0.0, 0.8])
    r = np.array([1e3, 1e5])
    y = r ** 4 * multipolar_weight(P, r[:, None] * d)
    assert y == pytest.approx([4.0, 4.0], rel=1e-5)


def test_appendix_identity():
    out = appendix_identity(3, 3, np.array([0.01, 0.3, 0.9]))
    assert out["inequality"]
    assert np.max(out["residual"]) < 1e-12


def test_model_end_potential_matches_sympy():
    # sympy: -Delta f/f - 1/(4 r^2) = 5c/(4 r^3) for f = r^{-1/2}, n = 3
    for r, ref in ((10.0, 1.25e-3), (100.0, 1.25e-6)):
        assert model_end_V0_identity(3, 1.0, np.array([r]))[0] == pytest.approx(ref, rel=1e-9)
    out = model_end_conditions(3, 1.0, np.array([10.0, 100.0]))
    assert out["V0"] == pytest.approx([1.25e-3, 1.25e-6], rel=1e-14)


def test_model_end_slopes():
    out = model_end_conditions(3, 1.0, np.geomspace(1e4, 1e10, 61))
    assert out["slopes"]["cond2"] == pytest.approx(-1.0, abs=1e-12)
    assert out["slopes"]["cond3"] == pytest.approx(-1.0, abs=1e-3)
    assert -1.0 < out["slopes"]["cond1"] <= -0.9
    assert out["density_limit"] == pytest.approx(math.pi)
    flat = model_end_conditions(3, 0.0, np.array([10.0, 100.0]))
    assert np.all(flat["cond1"] == 0) and flat["slopes"]["cond1"] is None


def test_multipolar_closed_form_points():
    P = np.array([[1.0, 0, 0], [-1.0, 0, 0]])
    on_axis = multipolar_residual(3, P, np.array([3.0, 0.0, 0.0]))
    assert on_axis["v"] == pytest.approx(8 ** -0.5, rel=1e-14) and on_axis["residual"] < 1e-10
    mid = multipolar_residual(3, P, np.array([0.0, 1.0, 0.0]))
    assert mid["v"] == pytest.approx(2 ** -0.5, rel=1e-14)
    assert mid["W"] == pytest.approx(1.0, rel=1e-15) and mid["residual"] < 1e-10
