"""High-precision numerical reference for the main problem.

Cartesian integration with the fictitious-time quadrature co-integrated as a
seventh state. The integrator is fixed-step Gauss-Legendre collocation
(s stages, order 2s, symplectic), with coefficients computed at import from
high-precision arithmetic, generic over double / double-double precision.
Dense output is realized by exact mini-step re-integration from the nearest
stored node, so interpolation error never enters the comparisons.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .elements import CartesianState, GravityModel

if os.environ.get("EPSLAB_PURE"):
    from . import _dd_py as _kern

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _ddcore as _kern  # type: ignore[no-redef]

        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _dd_py as _kern  # type: ignore[no-redef]

        KERNEL_BACKEND = "python"

DEFAULT_STAGES = 6

# Global-error constant of the s=6 scheme measured on a closed two-body orbit
# (see tests); err_rel ~= _ERR_C * (h * n_orbit)**12 per orbit, n_orbit = 2 pi / T.
_ERR_C = 3e-11


def _legendre_coeffs(n: int) -> list[Fraction]:
    """Exact monomial coefficients of the Legendre polynomial P_n."""
    p0 = [Fraction(1)]
    if n == 0:
        return p0
    p1 = [Fraction(0), Fraction(1)]
    for k in range(1, n):
        nxt = [Fraction(0)] * (k + 2)
        for i, c in enumerate(p1):
            nxt[i + 1] += Fraction(2 * k + 1, k + 1) * c
        for i, c in enumerate(p0):
            nxt[i] -= Fraction(k, k + 1) * c
        p0, p1 = p1, nxt
    return p1


def _dd_of(x) -> tuple[float, float]:
    hi = float(x)
    return hi, float(x - mp.mpf(hi))


@lru_cache(maxsize=None)
def collocation_coefficients(s: int = DEFAULT_STAGES):
    """Gauss-Legendre nodes c, stage matrix a, weights b on [0, 1].

    Returned as ((a_hi, a_lo), (b_hi, b_lo), (c_hi, c_lo)), flat row-major a.
    """
    with mp.workdps(60):
        coeffs = _legendre_coeffs(s)
        poly = [mp.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
        roots = mp.polyroots(poly, maxsteps=200, extraprec=80)
        nodes = sorted((mp.mpf(1) + mp.re(r)) / 2 for r in roots)

        def lagrange(j):
            num = [mp.mpf(1)]
            den = mp.mpf(1)
            for m, cm in enumerate(nodes):
                if m == j:
                    continue
                num = [mp.mpf(0)] + num
                shifted = [c * (-cm) for c in num[1:]] + [mp.mpf(0)]
                num = [num[i] + shifted[i] if i < len(shifted) else num[i]
                       for i in range(len(num))]
                den *= nodes[j] - cm
            return [c / den for c in num]  # low -> high degree

        def integral(coeffs_poly, upper):
            return sum(c * upper ** (k + 1) / (k + 1) for k, c in enumerate(coeffs_poly))

        ls = [lagrange(j) for j in range(s)]
        a_hi, a_lo, b_hi, b_lo, c_hi, c_lo = [], [], [], [], [], []
        for i in range(s):
            for j in range(s):
                hi, lo = _dd_of(integral(ls[j], nodes[i]))
                a_hi.append(hi)
                a_lo.append(lo)
        for j in range(s):
            hi, lo = _dd_of(integral(ls[j], mp.mpf(1)))
            b_hi.append(hi)
            b_lo.append(lo)
        for c in nodes:
            hi, lo = _dd_of(c)
            c_hi.append(hi)
            c_lo.append(lo)
    return (tuple(a_hi), tuple(a_lo)), (tuple(b_hi), tuple(b_lo)), (tuple(c_hi), tuple(c_lo))


def accel_main_problem(position, model: GravityModel) -> np.ndarray:
    """Acceleration of the main problem at a Cartesian position."""
    x, y, z = (float(v) for v in position)
    r2 = x * x + y * y + z * z
    if r2 <= 0.0:
        raise ValueError("zero radius")
    r = math.sqrt(r2)
    r3 = r2 * r
    r5 = r3 * r2
    mu_r3 = model.mu / r3
    k = 1.5 * model.j2 * model.mu * model.re ** 2 / r5
    z2r2 = z * z / r2
    return np.array([
        -mu_r3 * x - k * x * (1.0 - 5.0 * z2r2),
        -mu_r3 * y - k * y * (1.0 - 5.0 * z2r2),
        -mu_r3 * z - k * z * (3.0 - 5.0 * z2r2),
    ])


@dataclass(frozen=True, eq=False)
class ReferenceTrajectory:
    """Dense step-node record of one integration, plus drift diagnostics."""

    model: GravityModel
    precision: str
    t0: float
    h: float
    times: np.ndarray          # (N,)
    states: np.ndarray         # (N, 7) double snapshots, col 6 = tau
    states_lo: np.ndarray | None  # (N, 7) low parts in dd mode
    energy_drift: float        # max |E - E0| / |E0|
    n_drift: float             # max |N - N0| / |N0|
    stages: int
    iterations_mean: float

    @property
    def tau(self) -> np.ndarray:
        return self.states[:, 6]

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def sample(self, i: int) -> tuple[CartesianState, float]:
        s = self.states[i]
        return CartesianState(s[0:3].copy(), s[3:6].copy(), float(self.times[i])), float(s[6])


def _pick_step(t_span: float, tol: float, base: float, model: GravityModel,
               x0: CartesianState, stages: int) -> float:
    """Largest h = base / 2^k whose order-2s error model meets tol."""
    r = float(np.linalg.norm(x0.position))
    v2 = float(x0.velocity @ x0.velocity)
    energy = 0.5 * v2 - model.mu / r
    a = -model.mu / (2.0 * energy)
    n_orb = math.sqrt(model.mu / a ** 3)
    orbits = abs(t_span) * n_orb / (2.0 * math.pi) + 1.0
    h = base
    while _ERR_C * (h * n_orb) ** (2 * stages) * orbits > tol and h > 1e-3:
        h *= 0.5
    return h


def integrate(x0: CartesianState, t_span: float, tol: float = 1e-13,
              precision: str = "double", model: GravityModel | None = None,
              grid_step: float | None = None, stages: int = DEFAULT_STAGES,
              h_override: float | None = None) -> ReferenceTrajectory:
    """Integrate the main problem from x0 over t_span seconds.

    grid_step makes the step a divisor of the cadence so campaign epochs land
    exactly on stored nodes; h_override pins the step for convergence tests.
    """
    model = model or GravityModel()
    if precision not in ("double", "double-double"):
        raise ValueError(f"unknown precision {precision!r}")
    r = float(np.linalg.norm(x0.position))
    if 0.5 * float(x0.velocity @ x0.velocity) - model.mu / r >= 0.0:
        raise ValueError("reference requires a bound orbit")

    base = grid_step if grid_step else min(60.0, abs(t_span) / 4 or 60.0)
    if h_override:
        h = h_override
    else:
        h = _pick_step(t_span, tol, base, model, x0, stages)
    n_steps = int(round(t_span / h))
    if abs(n_steps * h - t_span) > 1e-9 * max(1.0, abs(t_span)):
        n_steps = int(math.ceil(t_span / h))
        h = t_span / n_steps

    (a_hi, a_lo), (b_hi, b_lo), _c = collocation_coefficients(stages)
    mu, re, j2 = model.mu, model.re, model.j2

    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 7))
    dd_mode = precision == "double-double"
    states_lo = np.zeros((n_steps + 1, 7)) if dd_mode else None

    y = [float(x0.position[0]), float(x0.position[1]), float(x0.position[2]),
         float(x0.velocity[0]), float(x0.velocity[1]), float(x0.velocity[2]), 0.0]
    times[0] = x0.t
    states[0] = y

    e0, n0 = _kern.energy_n_double(y, mu, re, j2)
    e_drift = 0.0
    n_drift_v = 0.0
    iter_total = 0

    if dd_mode:
        ypairs = []
        for v in y:
            ypairs += [v, 0.0]
        kwarm = None
        for i in range(n_steps):
            ypairs, kwarm, used = _kern.step_dd(ypairs, h, a_hi, a_lo, b_hi, b_lo,
                                                mu, re, j2, kwarm)
            iter_total += used
            hi = [ypairs[2 * m] for m in range(7)]
            times[i + 1] = x0.t + (i + 1) * h
            states[i + 1] = hi
            states_lo[i + 1] = [ypairs[2 * m + 1] for m in range(7)]
            e, nn = _kern.energy_n_double(hi, mu, re, j2)
            e_drift = max(e_drift, abs(e - e0))
            n_drift_v = max(n_drift_v, abs(nn - n0))
    else:
        kwarm = None
        for i in range(n_steps):
            y, kwarm, used = _kern.step_double(y, h, a_hi, b_hi, mu, re, j2, kwarm)
            iter_total += used
            times[i + 1] = x0.t + (i + 1) * h
            states[i + 1] = y
            e, nn = _kern.energy_n_double(y, mu, re, j2)
            e_drift = max(e_drift, abs(e - e0))
            n_drift_v = max(n_drift_v, abs(nn - n0))

    return ReferenceTrajectory(
        model=model, precision=precision, t0=x0.t, h=h,
        times=times, states=states, states_lo=states_lo,
        energy_drift=e_drift / abs(e0), n_drift=n_drift_v / abs(n0),
        stages=stages, iterations_mean=iter_total / max(1, n_steps),
    )


def _ministep(traj: ReferenceTrajectory, i: int, dt: float):
    """Exact re-integration from node i over dt (|dt| <= h); returns 7-state."""
    (a_hi, a_lo), (b_hi, b_lo), _ = collocation_coefficients(traj.stages)
    mu, re, j2 = traj.model.mu, traj.model.re, traj.model.j2
    if traj.precision == "double-double":
        ypairs = []
        for m in range(7):
            ypairs += [float(traj.states[i, m]), float(traj.states_lo[i, m])]
        out, _k, _u = _kern.step_dd(ypairs, dt, a_hi, a_lo, b_hi, b_lo, mu, re, j2)
        return [out[2 * m] + out[2 * m + 1] for m in range(7)]
    y = [float(v) for v in traj.states[i]]
    out, _k, _u = _kern.step_double(y, dt, a_hi, b_hi, mu, re, j2)
    return out


def state_at_time(traj: ReferenceTrajectory, t: float) -> tuple[CartesianState, float]:
    """Dense output at physical time t (inside the integrated span)."""
    t0, tend = float(traj.times[0]), float(traj.times[-1])
    if not (min(t0, tend) - 1e-9 <= t <= max(t0, tend) + 1e-9):
        raise ValueError(f"t = {t} outside integrated span [{t0}, {tend}]")
    i = int(np.clip(np.searchsorted(traj.times, t, side="right") - 1, 0, len(traj.times) - 1))
    dt = t - float(traj.times[i])
    if dt == 0.0:
        return traj.sample(i)
    y = _ministep(traj, i, dt)
    return CartesianState(np.array(y[0:3]), np.array(y[3:6]), t), y[6]


def state_at_tau(traj: ReferenceTrajectory, tau: float) -> tuple[CartesianState, float]:
    """Dense output at fictitious time tau; returns (state, t)."""
    taus = traj.tau
    if not (taus[0] - 1e-12 <= tau <= taus[-1] + 1e-12):
        raise ValueError(f"tau = {tau} outside integrated span")
    i = int(np.clip(np.searchsorted(taus, tau, side="right") - 1, 0, len(taus) - 2))
    # Newton in t on the monotone quadrature channel, converged in time units
    frac = (tau - taus[i]) / (taus[i + 1] - taus[i])
    t = float(traj.times[i]) + frac * traj.h
    state = None
    for _ in range(10):
        state, tau_t = state_at_time(traj, t)
        r2 = float(state.position @ state.position)
        hvec = np.cross(state.position, state.velocity)
        theta2 = float(hvec @ hvec)
        z = float(state.position[2])
        p2 = 0.5 * (3.0 * z * z / r2 - 1.0)
        rad = 1.0 + 2.0 * traj.model.j2 * (traj.model.mu / math.sqrt(r2)) \
            * (traj.model.re ** 2 / theta2) * p2
        gamma = 0.5 * math.sqrt(theta2) * (1.0 + math.sqrt(rad))
        resid_t = (tau_t - tau) / (gamma / r2)
        if abs(resid_t) < 1e-13:
            break
        t -= resid_t
    return state, t


def to_csv(traj: ReferenceTrajectory, path) -> None:
    """Audit export: t, tau, x, y, z, vx, vy, vz at every stored node."""
    with open(path, "w") as fh:
        fh.write("t,tau,x,y,z,vx,vy,vz\n")
        for i in range(len(traj.times)):
            s = traj.states[i]
            row = [traj.times[i], s[6], s[0], s[1], s[2], s[3], s[4], s[5]]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
