"""Pure-Python fallback for the jet arithmetic (numpy-backed).

Same API as the compiled extension; selected at import by liealgebra when the
extension is unavailable or EPSLAB_PURE=1.
"""

from __future__ import annotations

import math

import numpy as np

NVARS = 8

_PAIRS = ((0, 4), (1, 5), (2, 6), (3, 7))


class Jet:
    __slots__ = ("v", "_g", "_h")

    def __init__(self, v=0.0):
        self.v = float(v)
        self._g = np.zeros(8)
        self._h = np.zeros((8, 8))

    @staticmethod
    def variable(i, x):
        if not 0 <= i < 8:
            raise IndexError("variable index must be in 0..7")
        r = Jet(x)
        r._g[i] = 1.0
        return r

    @staticmethod
    def constant(x):
        return Jet(x)

    def dg(self, i):
        return float(self._g[i])

    def dh(self, i, j):
        return float(self._h[i, j])

    @property
    def grad(self):
        return [float(x) for x in self._g]

    @property
    def hess(self):
        return [[float(self._h[i, j]) for j in range(8)] for i in range(8)]

    def __repr__(self):
        return f"Jet({self.v!r})"

    def _lift(self, v, g, h):
        r = Jet.__new__(Jet)
        r.v = float(v)
        r._g = g
        r._h = h
        return r

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._lift(self.v + other.v, self._g + other._g, self._h + other._h)
        return self._lift(self.v + other, self._g.copy(), self._h.copy())

    __radd__ = __add__

    def __neg__(self):
        return self._lift(-self.v, -self._g, -self._h)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self._lift(self.v - other.v, self._g - other._g, self._h - other._h)
        return self._lift(self.v - other, self._g.copy(), self._h.copy())

    def __rsub__(self, other):
        return self._lift(other - self.v, -self._g, -self._h)

    def __mul__(self, other):
        if isinstance(other, Jet):
            cross = np.outer(self._g, other._g)
            return self._lift(
                self.v * other.v,
                self.v * other._g + other.v * self._g,
                self.v * other._h + other.v * self._h + cross + cross.T,
            )
        return self._lift(self.v * other, self._g * other, self._h * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            inv = 1.0 / other.v
            qv = self.v * inv
            qg = (self._g - qv * other._g) * inv
            cross = np.outer(qg, other._g)
            qh = (self._h - qv * other._h - cross - cross.T) * inv
            return self._lift(qv, qg, qh)
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        iv = 1.0 / self.v
        return self._compose(other * iv, -other * iv * iv, 2.0 * other * iv ** 3)

    def _compose(self, f0, f1, f2):
        return self._lift(f0, f1 * self._g, f1 * self._h + f2 * np.outer(self._g, self._g))

    def __pow__(self, n):
        if n == 2:
            return self * self
        x = self.v
        p = float(n)
        return self._compose(x ** p, p * x ** (p - 1.0), p * (p - 1.0) * x ** (p - 2.0))

    def sqrt(self):
        s = math.sqrt(self.v)
        return self._compose(s, 0.5 / s, -0.25 / (s * self.v))

    def sin(self):
        return self._compose(math.sin(self.v), math.cos(self.v), -math.sin(self.v))

    def cos(self):
        return self._compose(math.cos(self.v), -math.sin(self.v), -math.cos(self.v))


def atan2(y, x):
    """Two-argument arctangent over jets (either argument may be a float)."""
    yj = y if isinstance(y, Jet) else Jet(y)
    xj = x if isinstance(x, Jet) else Jet(x)
    xv, yv = xj.v, yj.v
    q = xv * xv + yv * yv
    fy = xv / q
    fx = -yv / q
    q2 = q * q
    fyy = -2.0 * xv * yv / q2
    fxx = 2.0 * xv * yv / q2
    fxy = (yv * yv - xv * xv) / q2
    g = fy * yj._g + fx * xj._g
    cyx = np.outer(yj._g, xj._g)
    h = (fy * yj._h + fx * xj._h
         + fyy * np.outer(yj._g, yj._g)
         + fxy * (cyx + cyx.T)
         + fxx * np.outer(xj._g, xj._g))
    r = Jet(math.atan2(yv, xv))
    r._g = g
    r._h = h
    return r


def bracket(f, g):
    """Poisson bracket value {f, g} at the jets' base point."""
    acc = 0.0
    for q, p in _PAIRS:
        acc += f._g[q] * g._g[p] - f._g[p] * g._g[q]
    return float(acc)


def bracket_grad(f, g):
    """Gradient of {f, g}: first partials of the bracket in the 8 variables."""
    acc = np.zeros(8)
    for q, p in _PAIRS:
        acc += (f._h[q] * g._g[p] + f._g[q] * g._h[p]
                - f._h[p] * g._g[q] - f._g[p] * g._h[q])
    return [float(x) for x in acc]


def nested_bracket(f, w):
    """{{f, w}, w} using only gradients and Hessians of f and w.

    Evaluated in extended precision: the intermediate terms can exceed the
    result by several orders of magnitude (near-circular 1/e enhancement),
    and their rounding would otherwise dominate second-order corrections.
    """
    fh = f._h.astype(np.longdouble)
    fg = f._g.astype(np.longdouble)
    wh = w._h.astype(np.longdouble)
    wg = w._g.astype(np.longdouble)
    ug = np.zeros(8, dtype=np.longdouble)
    for q, p in _PAIRS:
        ug += fh[q] * wg[p] + fg[q] * wh[p] - fh[p] * wg[q] - fg[p] * wh[q]
    acc = np.longdouble(0.0)
    for q, p in _PAIRS:
        acc += ug[q] * wg[p] - ug[p] * wg[q]
    return float(acc)
