import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyspec.jets import Jet
from hardyspec.xlog import (DomainError, NonConvergence, partial_R, select_D, series_sum, x_all,
                            x_deriv, x_eval, x_jet, x_prod)

# mpmath at 40 digits
X_AT_01 = (0.30279310656411387, 0.45564199359558967, 0.55989540450170885)
PARTIAL_AT_01 = (0.30279310656411387, 0.44075836128598855, 0.51800447338567387, 0.56689425405306699)


def test_values_at_one_tenth():
    for i, ref in enumerate(X_AT_01, start=1):
        assert x_eval(i, 0.1) == pytest.approx(ref, rel=1e-15)
    assert x_prod(3, 0.1) == pytest.approx(0.077246112099685319, rel=1e-15)


def test_level_zero_and_fixed_point():
    assert x_eval(0, 0.3) == 1.0
    assert x_prod(0, 0.3) == 1.0
    for i in range(6):
        assert x_eval(i, 1.0) == 1.0


def test_partial_sums_at_one_tenth():
    for i, ref in enumerate(PARTIAL_AT_01, start=1):
        assert partial_R(i, 0.1) == pytest.approx(ref, rel=1e-15)
    st_ = series_sum(0.1, tol=1e-6)
    assert st_.partial_sums[:4] == pytest.approx(PARTIAL_AT_01, rel=1e-15)


def test_partial_sum_at_inverse_e():
    assert partial_R(4, math.exp(-1)) == pytest.approx(1.1246879989041883, rel=1e-14)


def test_derivatives():
    assert x_deriv(1, math.exp(-1)) == pytest.approx(math.e / 4, rel=1e-14)
    assert x_deriv(2, 0.5) == pytest.approx(0.50686348707568613, rel=1e-14)


def test_jet_matches_closed_derivative():
    t = np.array([0.01, 0.2, 0.7])
    j = x_jet(3, Jet.var(t))
    assert np.allclose(j.v, x_eval(3, t), rtol=1e-15)
    assert np.allclose(j.d1, x_deriv(3, t), rtol=1e-13)


def test_domain_errors():
    with pytest.raises(DomainError):
        x_eval(1, 0.0)
    with pytest.raises(DomainError):
        x_eval(1, 1.5)
    with pytest.raises(DomainError):
        x_deriv(1, 1.0)
    with pytest.raises(DomainError):
        x_eval(-1, 0.5)
    with pytest.raises(DomainError):
        series_sum(1.0)


def test_series_cap_raises_with_state():
    with pytest.raises(NonConvergence) as exc:
        series_sum(0.3, tol=1e-14, cap=50)
    assert exc.value.state.n_terms == 50
    assert not exc.value.state.converged


def test_series_tail_flagged_heuristic():
    st_ = series_sum(0.2, tol=1e-8)
    assert st_.converged and st_.heuristic
    assert st_.remainder_bound > 0


def test_select_D_values():
    # mpmath root of X_1 + X_1 X_2 = 1
    assert select_D(0.5, 2) == pytest.approx(0.97019222938083682, rel=1e-9)
    assert select_D(1.0, 2) == pytest.approx(1.9403844587616736, rel=1e-9)
    assert select_D(0.5, 1) == 0.5
    assert select_D(1.0, 1) == 1.0


def test_select_D_all_is_feasible_and_tight():
    D = select_D(0.5, "all", tol=1e-10)
    st_ = series_sum(0.5 / D, tol=1e-10)
    assert st_.value + st_.remainder_bound <= 1.0
    assert st_.value + st_.remainder_bound == pytest.approx(1.0, abs=1e-8)
    assert D >= select_D(0.5, 40)


def test_select_D_margin_increases_D():
    assert select_D(0.5, 2, margin=0.1) > select_D(0.5, 2)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-12, 1.0), st.integers(1, 6))
def test_monotone_in_level_and_bounded(t, i):
    a, b = x_eval(i, t), x_eval(i + 1, t)
    assert 0.0 < a <= b <= 1.0


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-9, 0.999), st.floats(1e-9, 0.999), st.integers(1, 4))
def test_increasing_in_t(s, t, i):
    lo, hi = sorted((s, t))
    assert x_eval(i, lo) <= x_eval(i, hi)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 3.0), st.integers(1, 3))
def test_select_D_homogeneous(dm, i):
    assert select_D(dm, i) == pytest.approx(dm * select_D(1.0, i), rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-6, 0.99), st.integers(1, 5))
def test_recursion(t, i):
    xs = x_all(i + 1, t)
    assert xs[-1] == pytest.approx(1.0 / (1.0 - math.log(xs[-2] if i else t)), rel=1e-14)
