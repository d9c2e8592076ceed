"""Pure-Python fallback for the integrator kernels (same API as _ddcore)."""

from __future__ import annotations

import math

NEQ = 7

_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ahi = c - (c - a)
    alo = a - ahi
    c = _SPLIT * b
    bhi = c - (c - b)
    blo = b - bhi
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd_add(a, b):
    s1, s2 = _two_sum(a[0], b[0])
    t1, t2 = _two_sum(a[1], b[1])
    s2 += t1
    s1, s2 = _quick_two_sum(s1, s2)
    s2 += t2
    return _quick_two_sum(s1, s2)


def dd_sub(a, b):
    return dd_add(a, (-b[0], -b[1]))


def dd_mul(a, b):
    p1, p2 = _two_prod(a[0], b[0])
    p2 += a[0] * b[1] + a[1] * b[0]
    return _quick_two_sum(p1, p2)


def dd_muld(a, b):
    p1, p2 = _two_prod(a[0], b)
    p2 += a[1] * b
    return _quick_two_sum(p1, p2)


def dd_addd(a, b):
    s1, s2 = _two_sum(a[0], b)
    s2 += a[1]
    return _quick_two_sum(s1, s2)


def dd_div(a, b):
    q1 = a[0] / b[0]
    r = dd_sub(a, dd_muld(b, q1))
    q2 = r[0] / b[0]
    r = dd_sub(r, dd_muld(b, q2))
    q3 = r[0] / b[0]
    s = _quick_two_sum(q1, q2)
    return dd_addd(s, q3)


def dd_sqrt(a):
    if a[0] == 0.0 and a[1] == 0.0:
        return (0.0, 0.0)
    x = 1.0 / math.sqrt(a[0])
    ax = a[0] * x
    diff = dd_sub(a, dd_mul((ax, 0.0), (ax, 0.0)))
    return _quick_two_sum(ax, diff[0] * x * 0.5)


def _rhs_d(y, mu, re, j2):
    x, yy, z, vx, vy, vz = y[0], y[1], y[2], y[3], y[4], y[5]
    r2 = x * x + yy * yy + z * z
    r = math.sqrt(r2)
    r3 = r2 * r
    r5 = r3 * r2
    mu_r3 = mu / r3
    k = 1.5 * j2 * mu * re * re / r5
    z2r2 = z * z / r2
    hx = yy * vz - z * vy
    hy = z * vx - x * vz
    hz = x * vy - yy * vx
    th2 = hx * hx + hy * hy + hz * hz
    theta = math.sqrt(th2)
    p2 = 0.5 * (3.0 * z2r2 - 1.0)
    rad = 1.0 + 2.0 * j2 * (mu / r) * (re * re / th2) * p2
    gamma = 0.5 * theta * (1.0 + math.sqrt(rad))
    return [vx, vy, vz,
            -mu_r3 * x - k * x * (1.0 - 5.0 * z2r2),
            -mu_r3 * yy - k * yy * (1.0 - 5.0 * z2r2),
            -mu_r3 * z - k * z * (3.0 - 5.0 * z2r2),
            gamma / r2]


def _rhs_dd(y, mu, re, j2):
    x, yy, z = y[0], y[1], y[2]
    r2 = dd_add(dd_add(dd_mul(x, x), dd_mul(yy, yy)), dd_mul(z, z))
    r = dd_sqrt(r2)
    r3 = dd_mul(r2, r)
    r5 = dd_mul(r3, r2)
    mu_r3 = dd_div((mu, 0.0), r3)
    k = dd_div((1.5 * j2 * mu * re * re, 0.0), r5)
    z2r2 = dd_div(dd_mul(z, z), r2)
    one_m5 = dd_addd(dd_muld(z2r2, -5.0), 1.0)
    three_m5 = dd_addd(dd_muld(z2r2, -5.0), 3.0)
    ax = dd_add(dd_mul(mu_r3, x), dd_mul(dd_mul(k, x), one_m5))
    ay = dd_add(dd_mul(mu_r3, yy), dd_mul(dd_mul(k, yy), one_m5))
    az = dd_add(dd_mul(mu_r3, z), dd_mul(dd_mul(k, z), three_m5))
    hx = dd_sub(dd_mul(yy, y[5]), dd_mul(z, y[4]))
    hy = dd_sub(dd_mul(z, y[3]), dd_mul(x, y[5]))
    hz = dd_sub(dd_mul(x, y[4]), dd_mul(yy, y[3]))
    th2 = dd_add(dd_add(dd_mul(hx, hx), dd_mul(hy, hy)), dd_mul(hz, hz))
    theta = dd_sqrt(th2)
    p2 = dd_muld(dd_addd(dd_muld(z2r2, 3.0), -1.0), 0.5)
    rad = dd_addd(dd_mul(dd_div((2.0 * j2 * mu * re * re, 0.0), dd_mul(r, th2)), p2), 1.0)
    gamma = dd_muld(dd_mul(theta, dd_addd(dd_sqrt(rad), 1.0)), 0.5)
    return [y[3], y[4], y[5], (-ax[0], -ax[1]), (-ay[0], -ay[1]), (-az[0], -az[1]),
            dd_div(gamma, r2)]


def rhs_double(y, mu, re, j2):
    return _rhs_d(list(y), mu, re, j2)


def energy_n_double(y, mu, re, j2):
    x, yy, z, vx, vy, vz = y[0], y[1], y[2], y[3], y[4], y[5]
    r = math.sqrt(x * x + yy * yy + z * z)
    v2 = vx * vx + vy * vy + vz * vz
    slat = z / r
    p2 = 0.5 * (3.0 * slat * slat - 1.0)
    return (0.5 * v2 - mu / r + j2 * (mu / r) * (re / r) ** 2 * p2,
            x * vy - yy * vx)


def step_double(y, h, a_flat, b, mu, re, j2, kwarm=None, tol=5e-16, max_iter=40):
    s = len(b)
    y = list(y)
    if kwarm is None:
        k0 = _rhs_d(y, mu, re, j2)
        K = [list(k0) for _ in range(s)]
    else:
        K = [list(kwarm[i * NEQ:(i + 1) * NEQ]) for i in range(s)]
    scale = max(abs(v) for v in K[0])
    used = max_iter
    for it in range(max_iter):
        Kn = []
        for i in range(s):
            yi = [y[m] + h * sum(a_flat[i * s + j] * K[j][m] for j in range(s))
                  for m in range(NEQ)]
            Kn.append(_rhs_d(yi, mu, re, j2))
        diff = max(abs(Kn[i][m] - K[i][m]) for i in range(s) for m in range(NEQ))
        K = Kn
        if diff <= tol * scale:
            used = it + 1
            break
    out = [y[m] + h * sum(b[j] * K[j][m] for j in range(s)) for m in range(NEQ)]
    return out, [K[i][m] for i in range(s) for m in range(NEQ)], used


def step_dd(y_pairs, h, a_hi, a_lo, b_hi, b_lo, mu, re, j2,
            kwarm=None, tol=1e-30, max_iter=60):
    s = len(b_hi)
    y = [(y_pairs[2 * i], y_pairs[2 * i + 1]) for i in range(NEQ)]
    A = [(a_hi[i], a_lo[i]) for i in range(s * s)]
    B = [(b_hi[i], b_lo[i]) for i in range(s)]
    if kwarm is None:
        k0 = _rhs_dd(y, mu, re, j2)
        k0 = [v if isinstance(v, tuple) else v for v in k0]
        K = [list(k0) for _ in range(s)]
    else:
        K = [[(kwarm[2 * (i * NEQ + m)], kwarm[2 * (i * NEQ + m) + 1])
              for m in range(NEQ)] for i in range(s)]
    scale = max(abs(v[0]) for v in K[0])
    used = max_iter
    for it in range(max_iter):
        Kn = []
        for i in range(s):
            yi = []
            for m in range(NEQ):
                acc = (0.0, 0.0)
                for j in range(s):
                    acc = dd_add(acc, dd_mul(A[i * s + j], K[j][m]))
                yi.append(dd_add(y[m], dd_muld(acc, h)))
            Kn.append(_rhs_dd(yi, mu, re, j2))
        diff = 0.0
        for i in range(s):
            for m in range(NEQ):
                d = abs((Kn[i][m][0] - K[i][m][0]) + (Kn[i][m][1] - K[i][m][1]))
                if d > diff:
                    diff = d
        K = Kn
        if diff <= tol * scale:
            used = it + 1
            break
    out = []
    for m in range(NEQ):
        acc = (0.0, 0.0)
        for j in range(s):
            acc = dd_add(acc, dd_mul(B[j], K[j][m]))
        val = dd_add(y[m], dd_muld(acc, h))
        out += [val[0], val[1]]
    kout = []
    for i in range(s):
        for m in range(NEQ):
            kout += [K[i][m][0], K[i][m][1]]
    return out, kout, used
