"""Iterated normalized logarithms X_i and the product series sum_k X_1...X_k."""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import jets

TERM_CAP = 10 ** 6


class DomainError(ValueError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, msg, state=None):
        super().__init__(msg)
        self.state = state


def _log(t):
    # log t, switching to log1p near t = 1 where t - 1 is exact
    if np.ndim(t) == 0:
        t = float(t)
        if abs(t - 1.0) < 0.5:
            return math.log1p(t - 1.0)
        return math.log(t)
    t = np.asarray(t, dtype=float)
    near = np.abs(t - 1.0) < 0.5
    with np.errstate(divide="ignore"):
        return np.where(near, np.log1p(t - 1.0), np.log(t))


def _x1(t):
    return 1.0 / (1.0 - _log(t))


def _check(t, closed_right=True, open_left=True):
    a = np.asarray(t, dtype=float)
    bad = (a <= 0.0) if open_left else (a < 0.0)
    bad = bad | ((a > 1.0) if closed_right else (a >= 1.0))
    if np.any(bad) or np.any(np.isnan(a)):
        raise DomainError(f"argument outside domain: {t!r}")


def x_eval(i, t):
    """X_i(t) for t in (0, 1]; X_0 = 1."""
    if i < 0:
        raise DomainError("iteration depth must be nonnegative")
    _check(t)
    if i == 0:
        return 1.0 if np.ndim(t) == 0 else np.ones_like(np.asarray(t, dtype=float))
    y = t
    for _ in range(i):
        y = _x1(y)
    return y


def x_all(i, t):
    """List [X_1(t), ..., X_i(t)]."""
    _check(t)
    out = []
    y = t
    for _ in range(i):
        y = _x1(y)
        out.append(y)
    return out


def x_prod(i, t):
    if i < 0:
        raise DomainError("iteration depth must be nonnegative")
    _check(t)
    p = 1.0 if np.ndim(t) == 0 else np.ones_like(np.asarray(t, dtype=float))
    for x in x_all(i, t):
        p = p * x
    return p


def x_deriv(i, t):
    """X_i'(t) = (1/t) X_1...X_{i-1} X_i^2, open interval (0, 1)."""
    if i < 0:
        raise DomainError("iteration depth must be nonnegative")
    _check(t, closed_right=False)
    if i == 0:
        return 0.0 if np.ndim(t) == 0 else np.zeros_like(np.asarray(t, dtype=float))
    xs = x_all(i, t)
    p = 1.0
    for x in xs[:-1]:
        p = p * x
    return p * xs[-1] ** 2 / t


def x_jet(i, t):
    """X_i composed with a jet argument (exact first/second derivatives)."""
    y = t
    for _ in range(i):
        y = 1.0 / (1.0 - jets.log(y))
    if i == 0:
        return jets.Jet.const(1.0, t.v)
    return y


@dataclass
class SeriesState:
    t: float
    partial_sums: list = field(default_factory=list)
    remainder_bound: float = 0.0
    converged: bool = True
    heuristic: bool = False
    last_term: float = 0.0

    @property
    def n_terms(self):
        return len(self.partial_sums)

    @property
    def value(self):
        return self.partial_sums[-1] if self.partial_sums else 0.0


def _tail_bound(term, ratio):
    if ratio >= 1.0:
        return math.inf
    return term * ratio / (1.0 - ratio)


def series_sum(t, tol=1e-10, cap=TERM_CAP):
    """Partial sums of sum_{k>=1} X_1(t)...X_k(t) until term < tol * sum.

    The remainder bound compares the tail with a geometric series whose
    ratio is the last term ratio X_k(t). The ratios increase towards 1, so
    the bound is only heuristic; the flag says so.
    """
    if not (0.0 <= t < 1.0):
        raise DomainError(f"series needs t in [0, 1), got {t!r}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    st = SeriesState(t=float(t))
    if t == 0.0:
        return st
    x = float(t)
    term = 1.0
    total = 0.0
    ratios = []
    while True:
        x = _x1(x)
        term *= x
        total += term
        st.partial_sums.append(total)
        ratios.append(x)
        if term < tol * total:
            break
        if len(st.partial_sums) >= cap:
            st.converged = False
            break
    st.last_term = term
    r = ratios[-1]
    st.remainder_bound = _tail_bound(term, r)
    # a geometric comparison is certified only if the ratios are nonincreasing
    st.heuristic = len(ratios) > 1 and ratios[-1] > ratios[-2]
    if not st.converged:
        raise NonConvergence(f"series at t={t} did not reach tol after {cap} terms", st)
    return st


def partial_R(i, t):
    """R_i(t) = sum_{k=1}^{i} X_1...X_k (R_0 = 0)."""
    s = 0.0 if np.ndim(t) == 0 else np.zeros_like(np.asarray(t, dtype=float))
    p = 1.0
    for x in x_all(i, t):
        p = p * x
        s = s + p
    return s


def select_D(delta_max, i_max="all", margin=0.0, rtol=1e-10, tol=1e-10):
    """Smallest D with R_i(delta_max/D) <= 1 - margin for all i <= i_max.

    For i_max == "all" the series value plus its reported tail bound is
    compared with 1 - margin. Only the ratio delta_max/D matters, so the
    critical ratio is computed once per parameter set.
    """
    if not delta_max > 0:
        raise ValueError("delta_max must be positive")
    if not (0.0 <= margin < 1.0):
        raise ValueError("margin must lie in [0, 1)")
    key = i_max if i_max == "all" else int(i_max)
    return float(delta_max / _critical_ratio(key, float(margin), float(rtol), float(tol)))


@lru_cache(maxsize=64)
def _critical_ratio(i_max, margin, rtol, tol):
    """Largest t in (0, 1] with g(t) <= 1 - margin."""
    target = 1.0 - margin

    if i_max == "all":
        def g(t):
            if t >= 1.0:
                return math.inf
            st = series_sum(t, tol=tol)
            return st.value + st.remainder_bound
    else:
        def g(t):
            return partial_R(i_max, min(t, 1.0))

    # R is increasing in t
    if g(1.0) <= target:
        return 1.0
    # S(1/e) > 1.87 exceeds every target, so 1/e brackets from above
    hi = math.exp(-1.0) if i_max == "all" else 1.0
    lo = 0.5 * hi
    while g(lo) > target:
        lo *= 0.5
    t_star = brentq(lambda t: g(t) - target, lo, hi, xtol=1e-300, rtol=rtol)
    # g is only piecewise smooth (the term count jumps); back off until feasible
    step = rtol * t_star
    while g(t_star) > target:
        t_star -= step
        step *= 2.0
    return t_star
