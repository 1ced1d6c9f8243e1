"""Second-order forward jets (value, first, second derivative).

Profiles are written once as jet expressions so that every identity check
gets exact analytic derivatives instead of finite differences.
"""
import numpy as np


def _lift(x):
    if isinstance(x, Jet):
        return x
    return Jet(x, 0.0 * np.asarray(x, dtype=float), 0.0 * np.asarray(x, dtype=float))


class Jet:
    __slots__ = ("v", "d1", "d2")
    __array_priority__ = 100

    def __init__(self, v, d1, d2):
        self.v = v
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def var(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(x, np.ones_like(x), np.zeros_like(x))

    @classmethod
    def const(cls, c, like=0.0):
        z = 0.0 * np.asarray(like, dtype=float)
        return cls(c + z, z, z)

    def __add__(self, o):
        o = _lift(o)
        return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d1, -self.d2)

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) + (-self)

    def __mul__(self, o):
        o = _lift(o)
        return Jet(self.v * o.v,
                   self.d1 * o.v + self.v * o.d1,
                   self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def recip(self):
        inv = 1.0 / self.v
        return Jet(inv, -self.d1 * inv ** 2,
                   (2.0 * self.d1 ** 2 * inv - self.d2) * inv ** 2)

    def __truediv__(self, o):
        return self * _lift(o).recip()

    def __rtruediv__(self, o):
        return _lift(o) * self.recip()

    def __pow__(self, p):
        # real exponent only
        vp = self.v ** p
        g1 = p * self.v ** (p - 1)
        g2 = p * (p - 1) * self.v ** (p - 2)
        return Jet(vp, g1 * self.d1, g1 * self.d2 + g2 * self.d1 ** 2)

    def apply(self, f, f1, f2):
        """Chain rule with outer value f and outer derivatives f1, f2."""
        return Jet(f, f1 * self.d1, f1 * self.d2 + f2 * self.d1 ** 2)

    def __repr__(self):
        return f"Jet({self.v!r}, {self.d1!r}, {self.d2!r})"


def log(x):
    x = _lift(x)
    return x.apply(np.log(x.v), 1.0 / x.v, -1.0 / x.v ** 2)


def exp(x):
    x = _lift(x)
    e = np.exp(x.v)
    return x.apply(e, e, e)


def sqrt(x):
    x = _lift(x)
    r = np.sqrt(x.v)
    return x.apply(r, 0.5 / r, -0.25 / (r * x.v))


def abs_(x):
    x = _lift(x)
    s = np.sign(x.v)
    return Jet(np.abs(x.v), s * x.d1, s * x.d2)
