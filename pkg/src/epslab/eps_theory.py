"""Assembled extended-phase-space analytical propagator.

Initialization inverts the periodic eliminations at the osculating epoch with
the total-energy momentum set to the exact energy integral; the mean flow is
linear in fictitious time; reconstruction re-applies the direct eliminations
and recovers the physical epoch explicitly from the time element. Ephemeris
at a prescribed physical time needs a Newton inversion of the time equation,
re-evaluating the full theory each iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import hamiltonians as ham
from . import liealgebra as la
from . import reference as refmod
from ._dd_py import _two_prod, _two_sum
from .dsvars import (DSState, ds_to_polar, eccentricity_of, gamma_polar,
                     polar_to_ds, time_equation_defect)
from .elements import (CartesianState, GravityModel, cartesian_to_polar,
                       main_problem_energy, polar_to_cartesian)

NEWTON_TOL_S = 1e-12
NEWTON_MAX_ITER = 10


class NewtonDivergence(RuntimeError):
    """Time-equation inversion failed to reach tolerance within the cap."""


@dataclass(frozen=True)
class MeanEpsState:
    """Constants of the theory: mean momenta, initial angles, frequencies."""

    Phi: float
    G: float
    H: float
    Lam: float
    lam0: float
    theta0: float
    C0: float
    S0: float
    h0: float
    n_phi: float
    n_g: float
    n_h: float
    n_lam: float
    e_mean: float
    t0: float
    order: int
    model: GravityModel
    duv_zero: bool = False


@dataclass(frozen=True)
class Ephemeris:
    """Osculating output of one theory evaluation.

    t_pair carries the recovered epoch as an exact hi/lo sum so that time
    residuals stay meaningful below the double rounding of t itself
    (~1e-10 s at a 10-day range).
    """

    state: CartesianState
    tau: float
    t: float
    dt_dtau: float           # r^2 / Gamma > 0
    t_pair: tuple[float, float] = (0.0, 0.0)
    iterations: int = 0

    def t_minus(self, t_ref: float) -> float:
        """Exact-to-roundoff t - t_ref using the compensated epoch."""
        return (self.t_pair[0] - t_ref) + self.t_pair[1]


def initialize(x0: CartesianState, model: GravityModel, order: int,
               duv_zero: bool = False) -> MeanEpsState:
    """Build the mean state from an osculating Cartesian state."""
    if order not in (1, 2):
        raise ValueError("theory order must be 1 or 2")
    energy = main_problem_energy(x0, model)
    if energy >= 0.0:
        raise ValueError("extended-phase-space theory requires a bound orbit")
    polar, node = cartesian_to_polar(x0)
    ds = polar_to_ds(polar, -energy, model, node)
    prime = la.apply_map(ds, "short", "inverse", order, model)
    mean = la.apply_map(prime, "long", "inverse", order, model, duv_zero=duv_zero)

    pt = ham.CanonicalPoint.jets_from_ds(mean, model)
    K = ham.secular_hamiltonian(pt, max_m=order + 1)
    e_mean = eccentricity_of(mean, model)
    return MeanEpsState(
        Phi=mean.Phi, G=mean.G, H=mean.H, Lam=mean.Lam,
        lam0=mean.lam, theta0=mean.phi + mean.g,
        C0=e_mean * math.cos(mean.g), S0=e_mean * math.sin(mean.g),
        h0=mean.h,
        n_phi=K.dg(4), n_g=K.dg(5), n_h=K.dg(6), n_lam=K.dg(7),
        e_mean=e_mean, t0=x0.t, order=order, model=model, duv_zero=duv_zero,
    )


_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16


def _linear_angle_reduced(a0: float, rate: float, tau: float, tau_lo: float = 0.0) -> float:
    """a0 + rate*(tau + tau_lo) reduced mod 2 pi, ~1e-16 absolute accuracy.

    A plain product loses ~1e-13 rad at a 10-day fictitious-time range,
    which the Newton time inversion would see as ~1e-11 s jitter; the
    optional low word lets the inversion resolve tau below one ulp.
    """
    hi, lo = _two_sum(*_two_prod(rate, tau))
    lo += rate * tau_lo
    hi, lo2 = _two_sum(hi, a0)
    lo += lo2
    k = round(hi / _TWO_PI_HI)
    if k != 0:
        phi, plo = _two_prod(float(k), _TWO_PI_HI)
        hi, lo2 = _two_sum(hi, -phi)
        lo += lo2 - plo - k * _TWO_PI_LO
    return hi + lo


def _mean_state(m: MeanEpsState, tau: float, lam: float, reduced: bool = False,
                tau_lo: float = 0.0) -> DSState:
    if reduced:
        theta = _linear_angle_reduced(m.theta0, m.n_phi + m.n_g, tau, tau_lo)
        h = _linear_angle_reduced(m.h0, m.n_h, tau, tau_lo)
    else:
        theta = m.theta0 + (m.n_phi + m.n_g) * tau
        h = m.h0 + m.n_h * tau
    ang = _linear_angle_reduced(0.0, m.n_g, tau, tau_lo)
    cg, sg = math.cos(ang), math.sin(ang)
    C = m.C0 * cg - m.S0 * sg
    S = m.S0 * cg + m.C0 * sg
    g = math.atan2(S, C) if (C != 0.0 or S != 0.0) else 0.0
    return DSState(theta - g, g, h, lam, m.Phi, m.G, m.H, m.Lam, chart="mean",
                   e_hint=m.e_mean)


def propagate_mean(m: MeanEpsState, tau: float) -> DSState:
    """Linear mean flow at fictitious time tau (momenta constant)."""
    return _mean_state(m, tau, m.lam0 + m.n_lam * tau)


def _eval_at_tau(m: MeanEpsState, tau: float, tau_lo: float = 0.0) -> Ephemeris:
    """Mean -> prime -> osculating reconstruction and epoch recovery.

    The time element never enters the generators, so its large linear part
    lam0 + n_lam tau is carried as a compensated pair and only the small
    map increments and the time-equation defect flow through the chain.
    """
    mean = _mean_state(m, tau, 0.0, reduced=True, tau_lo=tau_lo)
    prime = la.apply_map(mean, "long", "direct", m.order, m.model,
                         duv_zero=m.duv_zero)
    osc = la.apply_map(prime, "short", "direct", m.order, m.model)
    polar = ds_to_polar(osc, m.model)   # polar.t = small increments + defect
    hi, lo = _two_sum(*_two_prod(m.n_lam, tau))
    lo += m.n_lam * tau_lo
    hi, lo2 = _two_sum(hi, m.lam0)
    lo += lo2
    hi, lo2 = _two_sum(hi, polar.t)
    lo += lo2
    t = hi + lo
    cart = polar_to_cartesian(
        type(polar)(polar.r, polar.R, polar.theta, polar.Theta, polar.N, t), osc.h)
    gamma = gamma_polar(polar, m.model)
    return Ephemeris(state=cart, tau=tau + tau_lo, t=t,
                     dt_dtau=polar.r * polar.r / gamma, t_pair=(hi, lo))


def osculating_at_tau(m: MeanEpsState, tau: float) -> Ephemeris:
    """Theory evaluation with the fictitious time as argument."""
    return _eval_at_tau(m, tau)


def _mean_time_guess(m: MeanEpsState, t_target: float) -> float:
    """Kepler time-of-flight solve on the mean elements (Newton, cheap)."""
    scale = m.model.mu / (2.0 * m.Lam) ** 1.5
    e = m.e_mean
    tau = (t_target - m.lam0) / m.n_lam
    for _ in range(12):
        theta = m.theta0 + (m.n_phi + m.n_g) * tau
        ang = m.n_g * tau
        C = m.C0 * math.cos(ang) - m.S0 * math.sin(ang)
        S = m.S0 * math.cos(ang) + m.C0 * math.sin(ang)
        g = math.atan2(S, C) if (C != 0.0 or S != 0.0) else 0.0
        phi = theta - g
        hi, lo = _two_sum(*_two_prod(m.n_lam, tau))
        resid = ((hi - t_target) + lo) + m.lam0 + scale * time_equation_defect(phi, e)
        if abs(resid) < 1e-10:
            break
        # d(defect)/dphi = (1 - e cos u) du/dphi - 1, du/dphi = eta/(1 + e cos phi)
        eta = math.sqrt(1.0 - e * e)
        k = round(phi / (2.0 * math.pi))
        phir = phi - 2.0 * math.pi * k
        u = 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(0.5 * phir),
                             math.sqrt(1.0 + e) * math.cos(0.5 * phir))
        ddefect = (1.0 - e * math.cos(u)) * eta / (1.0 + e * math.cos(phir)) - 1.0
        deriv = m.n_lam + scale * ddefect * m.n_phi
        tau -= resid / deriv
    return tau


def ephemeris_at_time(m: MeanEpsState, t_target: float,
                      tol: float = NEWTON_TOL_S,
                      max_iter: int = NEWTON_MAX_ITER) -> Ephemeris:
    """Newton inversion of the time equation; each iteration re-evaluates the
    full analytical theory."""
    tau = _mean_time_guess(m, t_target)
    tau_lo = 0.0
    eph = _eval_at_tau(m, tau, tau_lo)
    iters = 0
    while abs(eph.t_minus(t_target)) > tol:
        if iters >= max_iter:
            raise NewtonDivergence(
                f"|t - t_target| = {abs(eph.t_minus(t_target)):.3e} s after "
                f"{iters} iterations (tol {tol:.1e})")
        # keep tau as a hi/lo pair: one ulp of tau is worth ~1e-10 s of t
        # at the 10-day range, far above the convergence tolerance
        step = -eph.t_minus(t_target) / eph.dt_dtau
        hi, lo = _two_sum(tau, step)
        tau, tau_lo = hi, lo + tau_lo
        eph = _eval_at_tau(m, tau, tau_lo)
        iters += 1
    return Ephemeris(state=eph.state, tau=eph.tau, t=eph.t,
                     dt_dtau=eph.dt_dtau, t_pair=eph.t_pair, iterations=iters)


def timing_error(m: MeanEpsState, traj: "refmod.ReferenceTrajectory",
                 tau: float) -> float:
    """t_theory(tau) - t_reference(tau) against the co-integrated channel."""
    eph = osculating_at_tau(m, tau)
    _state, t_ref = refmod.state_at_tau(traj, tau)
    return eph.t_minus(t_ref)
