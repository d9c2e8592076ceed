"""Poisson brackets and the direct/inverse Lie-transform maps.

First- and second-order corrections are generated by differentiating the
closed-form generating functions (jets), never by transcribing expanded
series. The maps are composed in the non-singular set (theta, C, S, lam, h,
Phi, G): the argument-of-perigee and true-anomaly corrections carry 1/e
factors individually, but their observable combinations stay regular down to
circular orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import adscalar as ad
from . import hamiltonians as ham
from .dsvars import DSState
from .elements import GravityModel

# per-variable (conjugate slot, sign) for {xi, W}: coordinates take
# +dW/d(momentum), momenta take -dW/d(coordinate)
_CONJ = ((4, 1.0), (5, 1.0), (6, 1.0), (7, 1.0),
         (0, -1.0), (1, -1.0), (2, -1.0), (3, -1.0))

_VAR_NAMES = ("phi", "g", "h", "lam", "Phi", "G", "H", "Lam")

_CHART_FLOW = {
    ("short", "direct"): ("prime", "osculating"),
    ("short", "inverse"): ("osculating", "prime"),
    ("long", "direct"): ("mean", "prime"),
    ("long", "inverse"): ("prime", "mean"),
}


@dataclass(frozen=True)
class CorrectionVector:
    """Unscaled per-variable increments {xi, W}-style (J2 weights applied by
    the map composition, not here)."""

    dphi: float
    dg: float
    dh: float
    dlam: float
    dPhi: float
    dG: float
    dH: float
    dLam: float
    order: int
    kind: str        # "short" | "long"
    direction: str   # "direct" | "inverse"

    def as_tuple(self):
        return (self.dphi, self.dg, self.dh, self.dlam,
                self.dPhi, self.dG, self.dH, self.dLam)


def poisson(f, g, pt: ham.CanonicalPoint):
    """{f, g} at pt; f and g are fields (callables of a point) or jets."""
    fj = f(pt) if callable(f) else f
    gj = g(pt) if callable(g) else g
    return ad.bracket(fj, gj)


def _variable_brackets(wjet):
    """{xi, W} for the 8 canonical variables from W's gradient."""
    return tuple(sign * wjet.dg(slot) for slot, sign in _CONJ)


def _variable_nested(wjet):
    """{{xi, W}, W} for the 8 canonical variables from W's Hessian rows."""
    out = []
    for slot, sign in _CONJ:
        acc = 0.0
        for k in range(4):
            q, p = k, k + 4
            acc += wjet.dh(slot, q) * wjet.dg(p) - wjet.dh(slot, p) * wjet.dg(q)
        out.append(sign * acc)
    return tuple(out)


def first_order_correction(generator, ds: DSState, model: GravityModel) -> CorrectionVector:
    """delta_1 per canonical variable for generator in {w1, v1} (unscaled)."""
    pt = ham.CanonicalPoint.jets_from_ds(ds, model)
    wjet = generator(pt)
    kind = "long" if generator is ham.v1 else "short"
    d = _variable_brackets(wjet)
    return CorrectionVector(*d, order=1, kind=kind, direction="direct")


def second_order_correction(gen1, gen2, ds: DSState, model: GravityModel,
                            direction: str) -> CorrectionVector:
    """delta_2 per canonical variable: {{xi,W1},W1} +/- {xi,W2} (unscaled)."""
    if direction not in ("direct", "inverse"):
        raise ValueError("direction must be 'direct' or 'inverse'")
    pt = ham.CanonicalPoint.jets_from_ds(ds, model)
    aux = pt.aux()
    w1j = gen1(pt, aux)
    w2j = gen2(pt, aux)
    sgn = 1.0 if direction == "direct" else -1.0
    nested = _variable_nested(w1j)
    first2 = _variable_brackets(w2j)
    d = tuple(n + sgn * f for n, f in zip(nested, first2))
    kind = "long" if gen1 is ham.v1 else "short"
    return CorrectionVector(*d, order=2, kind=kind, direction=direction)


def _nonsingular_targets(pt: ham.CanonicalPoint, aux):
    """Jets of the regular map targets (theta, C, S, lam, h, Phi, G)."""
    e = aux.e
    return (
        pt.phi + pt.g,          # theta
        e * ad.cos(pt.g),       # C
        e * ad.sin(pt.g),       # S
        pt.lam,
        pt.h,
        pt.Phi,
        pt.G,
    )


def apply_map(ds: DSState, kind: str, direction: str, order: int,
              model: GravityModel, duv_zero: bool = False) -> DSState:
    """One elimination map (Lie-series composition at the input point).

    kind 'short' uses (W1, W2), 'long' uses (V1, V2); direction 'direct'
    composes xi + J2 d1 + J2^2/2 d2(+), 'inverse' xi - J2 d1 + J2^2/2 d2(-).
    The chart tag follows the elimination flow.
    """
    if kind not in ("short", "long"):
        raise ValueError("kind must be 'short' or 'long'")
    if direction not in ("direct", "inverse"):
        raise ValueError("direction must be 'direct' or 'inverse'")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")

    pt = ham.CanonicalPoint.jets_from_ds(ds, model)
    aux = pt.aux()
    if kind == "short":
        w1j = ham.w1(pt, aux)
        w2j = ham.w2(pt, aux) if order == 2 else None
    else:
        w1j = ham.v1(pt, aux)
        if order == 2:
            w2j = ham.v2(pt, pt.aux(duv_zero=True)) if duv_zero else ham.v2(pt, aux)
        else:
            w2j = None

    targets = _nonsingular_targets(pt, aux)
    j2 = model.j2
    sgn1 = 1.0 if direction == "direct" else -1.0
    sgn2 = 1.0 if direction == "direct" else -1.0  # on the {F, W2} part of d2

    incr = []
    for fj in targets:
        d1 = ad.bracket(fj, w1j)
        total = sgn1 * j2 * d1
        if order == 2:
            d2 = ad.nested_bracket(fj, w1j) + sgn2 * ad.bracket(fj, w2j)
            total += 0.5 * j2 * j2 * d2
        incr.append(total)

    theta0, c0, s0 = ad.value_of(targets[0]), ad.value_of(targets[1]), ad.value_of(targets[2])
    theta = theta0 + incr[0]
    cc = c0 + incr[1]
    ss = s0 + incr[2]
    lam = ds.lam + incr[3]
    hh = ds.h + incr[4]
    g_m = ds.G + incr[6]

    if cc == 0.0 and ss == 0.0:
        g_new = 0.0
    else:
        g_new = math.atan2(ss, cc)
    phi_new = theta - g_new

    # The mapped state's eccentricity comes from the corrected (C, S) pair,
    # and Phi is re-derived from (e, G, Lam) consistency: the raw Phi
    # increment's second-order defect is 1/e-enhanced and, through the
    # momenta-implied eccentricity and semilatus, would dominate the radial
    # reconstruction near circular orbits. Pinning the conic to the exact
    # energy momentum keeps the whole chain regular.
    e_new = min(math.hypot(cc, ss), 0.999999999999)
    mu = model.mu
    p_new = mu * (1.0 - e_new * e_new) / (2.0 * ds.Lam)
    phi_m = g_m - math.sqrt(mu * p_new) + mu / math.sqrt(2.0 * ds.Lam)

    _in, out_chart = _CHART_FLOW[(kind, direction)]
    return DSState(phi_new, g_new, hh, lam, phi_m, g_m, ds.H, ds.Lam,
                   chart=out_chart, e_hint=e_new)
