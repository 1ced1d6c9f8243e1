"""Inertia counts, bisection and inverse iteration for tridiagonal pencils."""
import io
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .discretize import Pencil

ITER_CAP = 400


class EigenError(RuntimeError):
    def __init__(self, msg, bracket=None):
        super().__init__(msg)
        self.bracket = bracket


@dataclass(frozen=True)
class Inertia:
    count: int
    perturbation: float  # size of the pivot perturbation used, 0 if none
    n_perturbed: int


@dataclass(frozen=True)
class Eigenvalue:
    index: int
    lower: float
    upper: float
    multiplicity_hint: int

    @property
    def value(self):
        return 0.5 * (self.lower + self.upper)


def _check(p):
    if not isinstance(p, Pencil):
        raise EigenError(f"expected a discretized pencil, got {type(p).__name__}; "
                         "multipolar scenarios are pointwise checks only")


def _norm_K(p):
    return float(np.max(np.abs(p.Kd)) + 2 * (np.max(np.abs(p.Ko)) if p.Ko.size else 0.0))


def inertia(pencil, lam):
    """Number of eigenvalues of K x = lam M x strictly below lam (Sylvester)."""
    _check(pencil)
    lam = float(lam)
    a = (pencil.Kd - lam * pencil.Md).tolist()
    b = (pencil.Ko - lam * pencil.Mo).tolist()
    eta = 1e-14 * max(_norm_K(pencil), 1e-300)
    neg = 0
    npert = 0
    d = a[0]
    if d == 0.0:
        d = eta
        npert += 1
    if d < 0:
        neg += 1
    for k in range(1, len(a)):
        bk = b[k - 1]
        d = a[k] - bk * bk / d
        if d == 0.0:
            d = eta
            npert += 1
        if d < 0:
            neg += 1
    return Inertia(neg, eta if npert else 0.0, npert)


def count_below(pencil, threshold):
    return inertia(pencil, threshold).count


def _bracket(pencil, j):
    lo, hi = -1.0, 1.0
    while inertia(pencil, lo).count > j:
        lo *= 2.0
        if lo < -1e300:
            raise EigenError("no lower bracket")
    while inertia(pencil, hi).count <= j:
        hi *= 2.0
        if hi > 1e300:
            raise EigenError("no upper bracket")
    return lo, hi


def _bisect(pencil, j, lo, hi, tol):
    for _ in range(ITER_CAP):
        width = hi - lo
        if width <= tol * max(abs(lo), abs(hi)) or width <= 1e-300:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return lo, hi
        if inertia(pencil, mid).count > j:
            hi = mid
        else:
            lo = mid
    raise EigenError("bisection iteration cap exceeded", (lo, hi))


def eig_bottom(pencil, k=1, tol=1e-12):
    """The k smallest eigenvalues as brackets [lower, upper] of relative width <= tol."""
    _check(pencil)
    if tol < 1e-13:
        raise ValueError("tol must be at least 1e-13")
    if k < 1:
        raise ValueError("k must be at least 1")
    k = min(k, pencil.n)
    out = []
    lo0, hi0 = _bracket(pencil, k - 1)
    lo_prev = lo0
    for j in range(k):
        lo, hi = _bisect(pencil, j, lo_prev, hi0, tol)
        mult = inertia(pencil, hi).count - inertia(pencil, lo).count
        out.append(Eigenvalue(j, lo, hi, max(mult, 1)))
        lo_prev = lo
    return out


def bottom(pencil, tol=1e-12):
    return eig_bottom(pencil, 1, tol)[0].value


def eigvec(pencil, lam, tol=1e-8, cap=50):
    """Inverse iteration; unit M-norm, sign-normalized so the largest entry is positive."""
    _check(pencil)
    n = pencil.n
    gap = 1e-6 * max(abs(lam), 1e-12)
    mult = inertia(pencil, lam + gap).count - inertia(pencil, lam - gap).count
    if mult > 1:
        warnings.warn(f"eigenvalue near {lam!r} has multiplicity {mult}; returning one vector")
    shift = lam - 1e-10 * max(abs(lam), 1e-12)
    ab = np.zeros((3, n))
    ab[0, 1:] = pencil.Ko - shift * pencil.Mo
    ab[1] = pencil.Kd - shift * pencil.Md
    ab[2, :-1] = pencil.Ko - shift * pencil.Mo
    x = np.ones(n)
    for _ in range(cap):
        y = solve_banded((1, 1), ab, pencil.apply_M(x))
        y /= np.sqrt(y @ pencil.apply_M(y))
        x = y
        Kx = pencil.apply_K(x)
        mu = float(x @ Kx)
        res = np.linalg.norm(Kx - mu * pencil.apply_M(x))
        if res <= tol * np.linalg.norm(Kx):
            break
    else:
        raise EigenError("inverse iteration did not converge")
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return x


def eig_csv(eigs):
    out = io.StringIO()
    out.write("index,lower,upper,value,multiplicity_hint\n")
    for e in eigs:
        out.write(f"{e.index},{float(e.lower)!r},{float(e.upper)!r},{float(e.value)!r},{e.multiplicity_hint}\n")
    return out.getvalue()
