# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Second-order truncated Taylor scalars over 8 canonical variables.

A Jet carries a value, the 8 first partials, and the symmetric 8x8 second
partials; arithmetic propagates them exactly (product/chain rules), which is
what turns closed-form generating functions into Poisson-bracket corrections.
"""

from libc.math cimport sqrt as c_sqrt, sin as c_sin, cos as c_cos, atan2 as c_atan2
from libc.string cimport memset

NVARS = 8

cdef inline Jet _blank():
    return Jet.__new__(Jet)


cdef class Jet:
    cdef public double v
    cdef double g[8]
    cdef double h[64]

    def __cinit__(self, double v=0.0):
        self.v = v
        memset(self.g, 0, 8 * sizeof(double))
        memset(self.h, 0, 64 * sizeof(double))

    @staticmethod
    def variable(int i, double x):
        if not 0 <= i < 8:
            raise IndexError("variable index must be in 0..7")
        cdef Jet r = _blank()
        r.v = x
        r.g[i] = 1.0
        return r

    @staticmethod
    def constant(double x):
        return Jet.__new__(Jet, x)

    def dg(self, int i):
        return self.g[i]

    def dh(self, int i, int j):
        return self.h[8 * i + j]

    @property
    def grad(self):
        return [self.g[i] for i in range(8)]

    @property
    def hess(self):
        return [[self.h[8 * i + j] for j in range(8)] for i in range(8)]

    def __repr__(self):
        return f"Jet({self.v!r})"

    # -- ring operations --------------------------------------------------

    cdef Jet _add_j(self, Jet b):
        cdef Jet r = _blank()
        cdef int i
        r.v = self.v + b.v
        for i in range(8):
            r.g[i] = self.g[i] + b.g[i]
        for i in range(64):
            r.h[i] = self.h[i] + b.h[i]
        return r

    cdef Jet _add_d(self, double b):
        cdef Jet r = _blank()
        cdef int i
        r.v = self.v + b
        for i in range(8):
            r.g[i] = self.g[i]
        for i in range(64):
            r.h[i] = self.h[i]
        return r

    cdef Jet _mul_j(self, Jet b):
        cdef Jet r = _blank()
        cdef int i, j
        r.v = self.v * b.v
        for i in range(8):
            r.g[i] = self.v * b.g[i] + b.v * self.g[i]
        for i in range(8):
            for j in range(8):
                r.h[8 * i + j] = (self.v * b.h[8 * i + j] + b.v * self.h[8 * i + j]
                                  + self.g[i] * b.g[j] + self.g[j] * b.g[i])
        return r

    cdef Jet _mul_d(self, double b):
        cdef Jet r = _blank()
        cdef int i
        r.v = self.v * b
        for i in range(8):
            r.g[i] = self.g[i] * b
        for i in range(64):
            r.h[i] = self.h[i] * b
        return r

    cdef Jet _div_j(self, Jet b):
        # q = a/b from a = q*b, peeling value, gradient, hessian in turn
        cdef Jet r = _blank()
        cdef int i, j
        cdef double inv = 1.0 / b.v
        r.v = self.v * inv
        for i in range(8):
            r.g[i] = (self.g[i] - r.v * b.g[i]) * inv
        for i in range(8):
            for j in range(8):
                r.h[8 * i + j] = (self.h[8 * i + j] - r.v * b.h[8 * i + j]
                                  - r.g[i] * b.g[j] - r.g[j] * b.g[i]) * inv
        return r

    cdef Jet _compose(self, double f0, double f1, double f2):
        # f(self) for scalar f with value/first/second derivative at self.v
        cdef Jet r = _blank()
        cdef int i, j
        r.v = f0
        for i in range(8):
            r.g[i] = f1 * self.g[i]
        for i in range(8):
            for j in range(8):
                r.h[8 * i + j] = f1 * self.h[8 * i + j] + f2 * self.g[i] * self.g[j]
        return r

    def __add__(self, other):
        if isinstance(other, Jet):
            return self._add_j(<Jet>other)
        return self._add_d(<double>other)

    def __radd__(self, other):
        return self._add_d(<double>other)

    def __neg__(self):
        return self._mul_d(-1.0)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self._add_j((<Jet>other)._mul_d(-1.0))
        return self._add_d(-<double>other)

    def __rsub__(self, other):
        return self._mul_d(-1.0)._add_d(<double>other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return self._mul_j(<Jet>other)
        return self._mul_d(<double>other)

    def __rmul__(self, other):
        return self._mul_d(<double>other)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self._div_j(<Jet>other)
        return self._mul_d(1.0 / <double>other)

    def __rtruediv__(self, other):
        cdef double c = <double>other
        cdef double iv = 1.0 / self.v
        return self._compose(c * iv, -c * iv * iv, 2.0 * c * iv * iv * iv)

    def __pow__(self, n, mod):
        if mod is not None:
            raise TypeError("pow() with modulus is not supported")
        cdef double x = self.v
        cdef double p = <double>n
        if n == 2:
            return self._mul_j(self)
        return self._compose(x ** p, p * x ** (p - 1.0), p * (p - 1.0) * x ** (p - 2.0))

    # -- transcendental ----------------------------------------------------

    def sqrt(self):
        cdef double s = c_sqrt(self.v)
        return self._compose(s, 0.5 / s, -0.25 / (s * self.v))

    def sin(self):
        cdef double s = c_sin(self.v)
        cdef double c = c_cos(self.v)
        return self._compose(s, c, -s)

    def cos(self):
        cdef double s = c_sin(self.v)
        cdef double c = c_cos(self.v)
        return self._compose(c, -s, -c)


def atan2(y, x):
    """Two-argument arctangent over jets (either argument may be a float)."""
    cdef Jet yj = y if isinstance(y, Jet) else Jet.__new__(Jet, <double>y)
    cdef Jet xj = x if isinstance(x, Jet) else Jet.__new__(Jet, <double>x)
    cdef Jet r = _blank()
    cdef int i, j
    cdef double xv = xj.v, yv = yj.v
    cdef double q = xv * xv + yv * yv
    cdef double fy = xv / q           # d/dy
    cdef double fx = -yv / q          # d/dx
    cdef double q2 = q * q
    cdef double fyy = -2.0 * xv * yv / q2
    cdef double fxx = 2.0 * xv * yv / q2
    cdef double fxy = (yv * yv - xv * xv) / q2
    r.v = c_atan2(yv, xv)
    for i in range(8):
        r.g[i] = fy * yj.g[i] + fx * xj.g[i]
    for i in range(8):
        for j in range(8):
            r.h[8 * i + j] = (fy * yj.h[8 * i + j] + fx * xj.h[8 * i + j]
                              + fyy * yj.g[i] * yj.g[j]
                              + fxy * (yj.g[i] * xj.g[j] + xj.g[i] * yj.g[j])
                              + fxx * xj.g[i] * xj.g[j])
    return r


# Canonical pairs (coordinate index, momentum index) for (phi,g,h,lambda).
_PAIRS = ((0, 4), (1, 5), (2, 6), (3, 7))


def bracket(Jet f, Jet g):
    """Poisson bracket value {f, g} at the jets' base point."""
    cdef double acc = 0.0
    cdef int q, p, k
    for k in range(4):
        q = k
        p = k + 4
        acc += f.g[q] * g.g[p] - f.g[p] * g.g[q]
    return acc


def bracket_grad(Jet f, Jet g):
    """Gradient of {f, g}: first partials of the bracket in the 8 variables."""
    cdef list out = []
    cdef int q, p, k, m
    cdef double acc
    for m in range(8):
        acc = 0.0
        for k in range(4):
            q = k
            p = k + 4
            acc += (f.h[8 * q + m] * g.g[p] + f.g[q] * g.h[8 * p + m]
                    - f.h[8 * p + m] * g.g[q] - f.g[p] * g.h[8 * q + m])
        out.append(acc)
    return out


cdef inline void _acc_prod(double a, double b, double* s, double* e) noexcept:
    # s,e += a*b with an exact product and compensated sum
    cdef double p, perr, c, abig, ahi, alo, bhi, blo, t, bb
    p = a * b
    c = 134217729.0 * a
    abig = c - a
    ahi = c - abig
    alo = a - ahi
    c = 134217729.0 * b
    abig = c - b
    bhi = c - abig
    blo = b - bhi
    perr = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    t = s[0] + p
    bb = t - s[0]
    e[0] += (s[0] - (t - bb)) + (p - bb) + perr
    s[0] = t


def nested_bracket(Jet f, Jet w):
    """{{f, w}, w} using only gradients and Hessians of f and w.

    Accumulated with exact products: the intermediate terms can exceed the
    result by several orders of magnitude (near-circular 1/e enhancement),
    and their rounding would otherwise dominate second-order corrections.
    """
    cdef double ug[8]
    cdef double ug_lo[8]
    cdef int q, p, k, m
    cdef double acc, err
    for m in range(8):
        acc = 0.0
        err = 0.0
        for k in range(4):
            q = k
            p = k + 4
            _acc_prod(f.h[8 * q + m], w.g[p], &acc, &err)
            _acc_prod(f.g[q], w.h[8 * p + m], &acc, &err)
            _acc_prod(-f.h[8 * p + m], w.g[q], &acc, &err)
            _acc_prod(-f.g[p], w.h[8 * q + m], &acc, &err)
        ug[m] = acc
        ug_lo[m] = err
    acc = 0.0
    err = 0.0
    for k in range(4):
        q = k
        p = k + 4
        _acc_prod(ug[q], w.g[p], &acc, &err)
        _acc_prod(ug_lo[q], w.g[p], &acc, &err)
        _acc_prod(-ug[p], w.g[q], &acc, &err)
        _acc_prod(-ug_lo[p], w.g[q], &acc, &err)
    return acc + err
