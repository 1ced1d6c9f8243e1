import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hardyspec import catalog
from hardyspec.measures_agmon import (AgmonFrame, MeasureError, PushforwardMeasure, Zone,
                                      agmon_distance, density_measure, eps_exp_check,
                                      frame_exterior_bottom, frame_pushforward, pushforward,
                                      sigma_rates, volume_growth)
from hardyspec.scenarios import Interval, ProfilePair, pair_delta


def test_interval_pushforward_two_ends():
    # v = 1 - log(delta), base = delta W = 1/(4 delta), both ends: density 1/2 in v
    zones = [Zone(0.0, 1.0, math.log(1e-12), math.log(0.5)),
             Zone(1.0, -1.0, math.log(1e-12), math.log(0.5))]
    chi = pushforward(lambda d: 1.0 - np.log(d), lambda d: 0.25 / d, [5.0, 15.0], zones,
                      by_distance=True)
    assert chi.masses[0] == pytest.approx(5.0, rel=1e-12)
    fr = frame_pushforward(catalog.get("interval-j0").frame(), [5.0, 15.0])
    assert fr.masses[0] == pytest.approx(5.0, rel=1e-12)


def test_change_of_variables_against_quad():
    # v = r^2 on [0.01, 2] with dr: int g dchi = int g(r^2) dr
    zone = Zone(0.0, 1.0, math.log(0.01), math.log(2.0))
    chi = pushforward(lambda r: r * r, np.ones_like, np.linspace(0.0, 4.0, 41), [zone])
    ref = quad(lambda r: math.sin(r * r), 0.01, 2.0, epsabs=1e-13)[0]
    assert chi.integrate(np.sin) == pytest.approx(ref, rel=1e-10)
    assert float(chi.V(4.0) - chi.V(1.0)) == pytest.approx(1.0, rel=1e-10)


def test_measure_validation():
    with pytest.raises(MeasureError):
        PushforwardMeasure([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(MeasureError):
        PushforwardMeasure([0.0, 1.0, 0.5], [1.0, 2.0])
    with pytest.raises(MeasureError):
        PushforwardMeasure([0.0, 1.0], [-1.0])
    with pytest.raises(MeasureError):
        volume_growth(PushforwardMeasure([0.0, 1.0], [0.0]))
    with pytest.raises(MeasureError):
        frame_pushforward(catalog.get("interval-j0").frame(), [0.0, 2.0])


def test_volume_growth_rates():
    bins = np.arange(0.0, 401.0)
    flat = volume_growth(density_measure(np.ones_like, bins))
    assert flat.sigma < 0.05 and flat.subexponential
    steep = volume_growth(density_measure(lambda t: np.exp(2.0 * t), bins[:301]))
    assert steep.sigma == pytest.approx(2.0, rel=1e-3) and not steep.subexponential


def test_eps_exp_check():
    bins = np.arange(0.0, 101.0)
    ok, C = eps_exp_check(density_measure(np.ones_like, bins), 0.1)
    assert ok and C == pytest.approx(1.0)
    ok, C = eps_exp_check(density_measure(lambda t: np.exp(0.5 * t), bins), 0.1)
    assert not ok


def test_to_csv_columns():
    chi = density_measure(np.ones_like, np.arange(0.0, 11.0))
    lines = chi.to_csv().splitlines()
    assert lines[0] == "r,V,S,logV_over_r"
    r, V, S, _ = map(float, lines[3].split(","))
    assert (r, V, S) == (2.0, pytest.approx(2.0), pytest.approx(1.0))


def test_agmon_distance_interval():
    dom = Interval(1.0)
    af = AgmonFrame(dom, pair_delta(dom, 1.0))
    assert agmon_distance(af, np.array([0.1]), np.array([0.5]))[0] == pytest.approx(0.5 * math.log(5.0))
    assert np.allclose(af.eikonal(np.array([0.01, 0.2, 0.45])), 1.0, rtol=1e-13)
    assert af.check_complete(np.array([1e-3, 1e-100]))


def test_incomplete_frame_detected():
    same = ProfilePair(lambda rj: rj, lambda rj: rj)
    af = AgmonFrame(Interval(1.0), same, weight=None)
    with pytest.raises(MeasureError):
        af.check_complete(np.array([1e-3, 1e-100]))


def test_sigma_rates_interval():
    rep = sigma_rates(catalog.get("interval-j0").frame())
    assert rep.sigma0 == pytest.approx(2.0, rel=0.05)
    assert rep.sigma1 == pytest.approx(2.0, rel=0.05)
    assert rep.mu0_finite and rep.mu1_infinite
    assert rep.lam_inf_estimate == pytest.approx(1.0, abs=0.01)
    assert rep.brooks["sigma1"]["holds"] and rep.equality["sigma1"]["holds"]


def test_exterior_bottom_scales_with_k():
    fr = catalog.get("interval-delta2").frame()
    assert frame_exterior_bottom(fr, 20.0) == pytest.approx(0.25, abs=0.01)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 50.0), st.floats(0.5, 50.0))
def test_volume_is_additive(a, w):
    chi = density_measure(lambda t: 1.0 + np.sin(t) ** 2, np.arange(0.0, 121.0))
    b = a + w
    assert float(chi.V(b) - chi.V(a)) == pytest.approx(float(chi.V(b) - chi.V(a + w / 2))
                                                      + float(chi.V(a + w / 2) - chi.V(a)))
    assert float(chi.S(a)) >= 0
