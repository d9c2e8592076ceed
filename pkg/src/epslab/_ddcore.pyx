# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Hot kernels of the numerical reference: double-double arithmetic, the
main-problem right-hand side (with the fictitious-time quadrature channel),
and the implicit collocation stage iteration in both precisions.

State layout: y = (x, y, z, vx, vy, vz, tau); the system is autonomous.
"""

from libc.math cimport sqrt as c_sqrt

DEF MAXS = 8   # max collocation stages
DEF NEQ = 7

_SPLITTER = 134217729.0  # 2^27 + 1

cdef struct DD:
    double hi
    double lo

cdef inline DD dd_make(double hi, double lo) noexcept:
    cdef DD r
    r.hi = hi
    r.lo = lo
    return r

cdef inline void two_sum(double a, double b, double* s, double* e) noexcept:
    cdef double bb
    s[0] = a + b
    bb = s[0] - a
    e[0] = (a - (s[0] - bb)) + (b - bb)

cdef inline void quick_two_sum(double a, double b, double* s, double* e) noexcept:
    s[0] = a + b
    e[0] = b - (s[0] - a)

cdef inline void two_prod(double a, double b, double* p, double* e) noexcept:
    cdef double c, abig, ahi, alo, bhi, blo
    p[0] = a * b
    c = 134217729.0 * a
    abig = c - a
    ahi = c - abig
    alo = a - ahi
    c = 134217729.0 * b
    abig = c - b
    bhi = c - abig
    blo = b - bhi
    e[0] = ((ahi * bhi - p[0]) + ahi * blo + alo * bhi) + alo * blo

cdef inline DD dd_add(DD a, DD b) noexcept:
    cdef double s1, s2, t1, t2
    two_sum(a.hi, b.hi, &s1, &s2)
    two_sum(a.lo, b.lo, &t1, &t2)
    s2 += t1
    quick_two_sum(s1, s2, &s1, &s2)
    s2 += t2
    quick_two_sum(s1, s2, &s1, &s2)
    return dd_make(s1, s2)

cdef inline DD dd_neg(DD a) noexcept:
    return dd_make(-a.hi, -a.lo)

cdef inline DD dd_sub(DD a, DD b) noexcept:
    return dd_add(a, dd_neg(b))

cdef inline DD dd_mul(DD a, DD b) noexcept:
    cdef double p1, p2
    two_prod(a.hi, b.hi, &p1, &p2)
    p2 += a.hi * b.lo + a.lo * b.hi
    quick_two_sum(p1, p2, &p1, &p2)
    return dd_make(p1, p2)

cdef inline DD dd_muld(DD a, double b) noexcept:
    cdef double p1, p2
    two_prod(a.hi, b, &p1, &p2)
    p2 += a.lo * b
    quick_two_sum(p1, p2, &p1, &p2)
    return dd_make(p1, p2)

cdef inline DD dd_addd(DD a, double b) noexcept:
    cdef double s1, s2
    two_sum(a.hi, b, &s1, &s2)
    s2 += a.lo
    quick_two_sum(s1, s2, &s1, &s2)
    return dd_make(s1, s2)

cdef inline DD dd_div(DD a, DD b) noexcept:
    cdef double q1, q2, q3
    cdef DD r
    q1 = a.hi / b.hi
    r = dd_sub(a, dd_muld(b, q1))
    q2 = r.hi / b.hi
    r = dd_sub(r, dd_muld(b, q2))
    q3 = r.hi / b.hi
    cdef double s, e
    quick_two_sum(q1, q2, &s, &e)
    return dd_addd(dd_make(s, e), q3)

cdef inline DD dd_sqrt(DD a) noexcept:
    # Karp's trick: one double estimate plus a double-double correction.
    if a.hi == 0.0 and a.lo == 0.0:
        return dd_make(0.0, 0.0)
    cdef double x = 1.0 / c_sqrt(a.hi)
    cdef double ax = a.hi * x
    cdef DD axdd = dd_make(ax, 0.0)
    cdef DD diff = dd_sub(a, dd_mul(axdd, axdd))
    cdef double corr = diff.hi * x * 0.5
    cdef double s, e
    quick_two_sum(ax, corr, &s, &e)
    return dd_make(s, e)


# --- main-problem right-hand side ------------------------------------------

cdef inline void rhs_d(const double* y, double mu, double re, double j2,
                       double* f) noexcept:
    """f = d/dt (x, v, tau): two-body + J2 acceleration, dtau/dt = Gamma/r^2."""
    cdef double x = y[0], yy = y[1], z = y[2]
    cdef double r2 = x * x + yy * yy + z * z
    cdef double r = c_sqrt(r2)
    cdef double r3 = r2 * r
    cdef double r5 = r3 * r2
    cdef double mu_r3 = mu / r3
    cdef double k = 1.5 * j2 * mu * re * re / r5
    cdef double z2r2 = z * z / r2
    f[0] = y[3]
    f[1] = y[4]
    f[2] = y[5]
    f[3] = -mu_r3 * x - k * x * (1.0 - 5.0 * z2r2)
    f[4] = -mu_r3 * yy - k * yy * (1.0 - 5.0 * z2r2)
    f[5] = -mu_r3 * z - k * z * (3.0 - 5.0 * z2r2)
    # angular momentum components
    cdef double hx = yy * y[5] - z * y[4]
    cdef double hy = z * y[3] - x * y[5]
    cdef double hz = x * y[4] - yy * y[3]
    cdef double th2 = hx * hx + hy * hy + hz * hz
    cdef double theta = c_sqrt(th2)
    cdef double p2 = 0.5 * (3.0 * z2r2 - 1.0)
    cdef double rad = 1.0 + 2.0 * j2 * (mu / r) * (re * re / th2) * p2
    cdef double gamma = 0.5 * theta * (1.0 + c_sqrt(rad))
    f[6] = gamma / r2

cdef inline void rhs_dd(const DD* y, double mu, double re, double j2,
                        DD* f) noexcept:
    cdef DD x = y[0], yy = y[1], z = y[2]
    cdef DD r2 = dd_add(dd_add(dd_mul(x, x), dd_mul(yy, yy)), dd_mul(z, z))
    cdef DD r = dd_sqrt(r2)
    cdef DD r3 = dd_mul(r2, r)
    cdef DD r5 = dd_mul(r3, r2)
    cdef DD mu_r3 = dd_div(dd_make(mu, 0.0), r3)
    cdef DD k = dd_div(dd_make(1.5 * j2 * mu * re * re, 0.0), r5)
    cdef DD z2r2 = dd_div(dd_mul(z, z), r2)
    f[0] = y[3]
    f[1] = y[4]
    f[2] = y[5]
    cdef DD one_m5 = dd_addd(dd_muld(z2r2, -5.0), 1.0)
    cdef DD three_m5 = dd_addd(dd_muld(z2r2, -5.0), 3.0)
    f[3] = dd_neg(dd_add(dd_mul(mu_r3, x), dd_mul(dd_mul(k, x), one_m5)))
    f[4] = dd_neg(dd_add(dd_mul(mu_r3, yy), dd_mul(dd_mul(k, yy), one_m5)))
    f[5] = dd_neg(dd_add(dd_mul(mu_r3, z), dd_mul(dd_mul(k, z), three_m5)))
    cdef DD hx = dd_sub(dd_mul(yy, y[5]), dd_mul(z, y[4]))
    cdef DD hy = dd_sub(dd_mul(z, y[3]), dd_mul(x, y[5]))
    cdef DD hz = dd_sub(dd_mul(x, y[4]), dd_mul(yy, y[3]))
    cdef DD th2 = dd_add(dd_add(dd_mul(hx, hx), dd_mul(hy, hy)), dd_mul(hz, hz))
    cdef DD theta = dd_sqrt(th2)
    cdef DD p2 = dd_muld(dd_addd(dd_muld(z2r2, 3.0), -1.0), 0.5)
    cdef DD rad = dd_addd(
        dd_mul(dd_div(dd_make(2.0 * j2 * mu * re * re, 0.0), dd_mul(r, th2)), p2), 1.0)
    cdef DD gamma = dd_muld(dd_mul(theta, dd_addd(dd_sqrt(rad), 1.0)), 0.5)
    f[6] = dd_div(gamma, r2)


def rhs_double(y, double mu, double re, double j2):
    """Python-visible RHS in double precision (7-state)."""
    cdef double yy[NEQ]
    cdef double ff[NEQ]
    cdef int i
    for i in range(NEQ):
        yy[i] = y[i]
    rhs_d(yy, mu, re, j2, ff)
    return [ff[i] for i in range(NEQ)]


def energy_n_double(y, double mu, double re, double j2):
    """(energy, polar angular momentum) of a 7-state, double precision."""
    cdef double x = y[0], yy = y[1], z = y[2]
    cdef double vx = y[3], vy = y[4], vz = y[5]
    cdef double r = c_sqrt(x * x + yy * yy + z * z)
    cdef double v2 = vx * vx + vy * vy + vz * vz
    cdef double slat = z / r
    cdef double p2 = 0.5 * (3.0 * slat * slat - 1.0)
    cdef double e = 0.5 * v2 - mu / r + j2 * (mu / r) * (re / r) * (re / r) * p2
    cdef double n = x * vy - yy * vx
    return e, n


def step_double(y, double h, a_flat, b, double mu, double re, double j2,
                kwarm=None, double tol=5e-16, int max_iter=40):
    """One fixed-point collocation step in double precision.

    Returns (y_new, k_flat, iterations); k_flat warm-starts the next step.
    """
    cdef int s = len(b)
    cdef int i, j, m, it
    cdef double yy[NEQ]
    cdef double A[MAXS * MAXS]
    cdef double B[MAXS]
    cdef double K[MAXS * NEQ]
    cdef double Kn[MAXS * NEQ]
    cdef double Yi[NEQ]
    cdef double scale, diff, acc
    for i in range(NEQ):
        yy[i] = y[i]
    for i in range(s * s):
        A[i] = a_flat[i]
    for i in range(s):
        B[i] = b[i]
    if kwarm is None:
        rhs_d(yy, mu, re, j2, &K[0])
        for i in range(1, s):
            for m in range(NEQ):
                K[i * NEQ + m] = K[m]
    else:
        for i in range(s * NEQ):
            K[i] = kwarm[i]
    scale = 0.0
    for m in range(NEQ):
        if abs(K[m]) > scale:
            scale = abs(K[m])
    cdef int used = max_iter
    for it in range(max_iter):
        for i in range(s):
            for m in range(NEQ):
                acc = 0.0
                for j in range(s):
                    acc += A[i * s + j] * K[j * NEQ + m]
                Yi[m] = yy[m] + h * acc
            rhs_d(Yi, mu, re, j2, &Kn[i * NEQ])
        diff = 0.0
        for i in range(s * NEQ):
            if abs(Kn[i] - K[i]) > diff:
                diff = abs(Kn[i] - K[i])
            K[i] = Kn[i]
        if diff <= tol * scale:
            used = it + 1
            break
    out = [0.0] * NEQ
    for m in range(NEQ):
        acc = 0.0
        for j in range(s):
            acc += B[j] * K[j * NEQ + m]
        out[m] = yy[m] + h * acc
    return out, [K[i] for i in range(s * NEQ)], used


def step_dd(y_pairs, double h, a_hi, a_lo, b_hi, b_lo,
            double mu, double re, double j2,
            kwarm=None, double tol=1e-30, int max_iter=60):
    """One fixed-point collocation step in double-double precision.

    y_pairs is a flat list (hi, lo) x 7; coefficients come as separate
    hi/lo arrays; returns (y_new_pairs, k_pairs, iterations).
    """
    cdef int s = len(b_hi)
    cdef int i, j, m, it
    cdef DD yy[NEQ]
    cdef DD A[MAXS * MAXS]
    cdef DD B[MAXS]
    cdef DD K[MAXS * NEQ]
    cdef DD Kn[MAXS * NEQ]
    cdef DD Yi[NEQ]
    cdef DD acc
    cdef double scale, diff, d
    for i in range(NEQ):
        yy[i] = dd_make(y_pairs[2 * i], y_pairs[2 * i + 1])
    for i in range(s * s):
        A[i] = dd_make(a_hi[i], a_lo[i])
    for i in range(s):
        B[i] = dd_make(b_hi[i], b_lo[i])
    if kwarm is None:
        rhs_dd(yy, mu, re, j2, &K[0])
        for i in range(1, s):
            for m in range(NEQ):
                K[i * NEQ + m] = K[m]
    else:
        for i in range(s * NEQ):
            K[i] = dd_make(kwarm[2 * i], kwarm[2 * i + 1])
    scale = 0.0
    for m in range(NEQ):
        if abs(K[m].hi) > scale:
            scale = abs(K[m].hi)
    cdef int used = max_iter
    for it in range(max_iter):
        for i in range(s):
            for m in range(NEQ):
                acc = dd_make(0.0, 0.0)
                for j in range(s):
                    acc = dd_add(acc, dd_mul(A[i * s + j], K[j * NEQ + m]))
                Yi[m] = dd_add(yy[m], dd_muld(acc, h))
            rhs_dd(Yi, mu, re, j2, &Kn[i * NEQ])
        diff = 0.0
        for i in range(s * NEQ):
            d = abs((Kn[i].hi - K[i].hi) + (Kn[i].lo - K[i].lo))
            if d > diff:
                diff = d
            K[i] = Kn[i]
        if diff <= tol * scale:
            used = it + 1
            break
    out = [0.0] * (2 * NEQ)
    for m in range(NEQ):
        acc = dd_make(0.0, 0.0)
        for j in range(s):
            acc = dd_add(acc, dd_mul(B[j], K[j * NEQ + m]))
        acc = dd_add(yy[m], dd_muld(acc, h))
        out[2 * m] = acc.hi
        out[2 * m + 1] = acc.lo
    kout = [0.0] * (2 * s * NEQ)
    for i in range(s * NEQ):
        kout[2 * i] = K[i].hi
        kout[2 * i + 1] = K[i].lo
    return out, kout, used
