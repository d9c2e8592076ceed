"""Delaunay-similar chart of the extended phase space.

Forward map from polar variables, inverse map, the time element, and the
auxiliary functions every generating function is built from. The chart
carries the true anomaly phi as angle and the total-energy momentum Lam as
fourth action; the time element lam has time units, is never wrapped, and
recovers the physical epoch explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import adscalar as ad
from .elements import GravityModel, PolarState, TWO_PI

# DS angles/momenta slot order shared with the jet kernel.
I_PHI, I_G, I_H, I_LAM, I_PPHI, I_PG, I_PH, I_PLAM = range(8)

ECC_TINY = 1e-13

CHARTS = ("osculating", "prime", "mean")

_DEFAULT_MODEL = GravityModel()


@dataclass(frozen=True)
class DSState:
    """Delaunay-similar variables (phi, g, h, lam | Phi, G, H, Lam)."""

    phi: float   # true anomaly (rad), revolution-carrying
    g: float     # argument of perigee (rad)
    h: float     # RAAN (rad)
    lam: float   # time element (s), never wrapped
    Phi: float   # km^2/s
    G: float     # km^2/s
    H: float     # km^2/s
    Lam: float   # km^2/s^2, total-energy momentum Q
    chart: str = "osculating"
    # Full-precision eccentricity carried alongside the momenta: recovering e
    # from Phi re-incurs the 1 - 2 Lam p / mu cancellation (~6e-14 per ulp of
    # Phi), which the time equation amplifies by ~1e3 s. Purely a precision
    # cache, always consistent with the momenta to that cancellation level.
    e_hint: float | None = None

    def __post_init__(self):
        if self.Lam <= 0.0:
            raise ValueError("Lam must be positive (bound orbit)")
        if self.G <= 0.0:
            raise ValueError("G must be positive")
        if abs(self.H) > self.G * (1.0 + 1e-13):
            raise ValueError("|H| must not exceed G")
        if self.chart not in CHARTS:
            raise ValueError(f"unknown chart tag {self.chart!r}")

    @property
    def theta(self) -> float:
        """Argument of latitude phi + g."""
        return self.phi + self.g

    def with_chart(self, chart: str) -> "DSState":
        return replace(self, chart=chart)


@dataclass(frozen=True)
class AuxSet:
    """Auxiliary functions of a canonical point (scalar kind S: float or jet)."""

    Gamma: object
    rho: object
    p: object
    e: object
    s2: object       # sin^2 I
    c2: object       # cos^2 I
    delta: object    # Gamma/G - 1
    upsilon: object  # rho/p - 1
    Delta: object    # 3(5 s^2 - 4) + 6(s^2 - 1) delta + 2(3 s^2 - 2) upsilon
    u: object = None  # eccentric-anomaly-like angle, filled on request


def ecc_anomaly_like(phi: float, e: float) -> float:
    """Half-angle map phi -> u on the same revolution."""
    k = round(phi / TWO_PI)
    phir = phi - TWO_PI * k
    u = 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(0.5 * phir),
                         math.sqrt(1.0 + e) * math.cos(0.5 * phir))
    return u + TWO_PI * k


def time_equation_defect(phi: float, e: float) -> float:
    """u - e sin u - phi, evaluated revolution-free (bounded, periodic).

    (u - phi) is formed analytically instead of differencing two O(pi)
    angles: the naive difference carries ~3e-16 rad of cancellation noise,
    which the time equation scales by ~1e3 s.
    """
    k = round(phi / TWO_PI)
    phir = phi - TWO_PI * k
    sq_m = math.sqrt(1.0 - e)
    sq_p = math.sqrt(1.0 + e)
    beta_m1 = -2.0 * e / ((sq_m + sq_p) * sq_p)   # sqrt((1-e)/(1+e)) - 1
    s_half = math.sin(0.5 * phir)
    c_half = math.cos(0.5 * phir)
    u_minus_phi = 2.0 * math.atan(
        beta_m1 * s_half * c_half / (c_half * c_half + (1.0 + beta_m1) * s_half * s_half))
    return u_minus_phi - e * math.sin(phir + u_minus_phi)


def time_defect_from_cs(theta: float, C: float, S: float) -> float:
    """u - e sin u - phi from the regular set (theta, C, S).

    e sin(phi) and e cos(phi) are rebuilt from the eccentricity-vector
    components (the phi/g split itself is noisy at the 1/e level near
    circular orbits, but these combinations are not), and u - phi comes
    from an exact arcsine identity:
        sin(u - phi) = -e sin(phi) [1 + e cos(phi)/(1 + eta)] / (1 + e cos(phi)).
    Valid while |u - phi| < pi/2, which holds for any e below ~0.9.
    """
    st, ct = math.sin(theta), math.cos(theta)
    es = C * st - S * ct           # e sin phi
    ec = C * ct + S * st           # e cos phi
    e2 = C * C + S * S
    eta = math.sqrt(max(0.0, 1.0 - e2))
    denom = 1.0 + ec
    sin_ump = -es * (1.0 + ec / (1.0 + eta)) / denom
    if abs(sin_ump) >= 1.0:
        raise ValueError("u - phi left the arcsine branch (extreme eccentricity)")
    ump = math.asin(sin_ump)
    # e sin u = eta e sin(phi) / (1 + e cos(phi)), exact
    return ump - eta * es / denom


def gamma_polar(p: PolarState, model: GravityModel):
    """Gamma in the polar chart; equals Theta when J2 = 0."""
    s2 = 1.0 - (p.N / p.Theta) ** 2
    s = math.sqrt(max(0.0, s2))
    slat = s * math.sin(p.theta)
    p2 = 0.5 * (3.0 * slat * slat - 1.0)
    radicand = 1.0 + 2.0 * model.j2 * (model.mu / p.r) * (model.re / p.Theta) ** 2 * p2
    if radicand <= 0.0:
        raise ValueError("Gamma radicand non-positive: state too deep in the field")
    return 0.5 * p.Theta * (1.0 + math.sqrt(radicand))


def polar_to_ds(p: PolarState, Q: float, model: GravityModel, node: float = 0.0) -> DSState:
    """Forward chart map; Q is the total-energy momentum (Q = -H(x0) at init)."""
    if Q <= 0.0:
        raise ValueError("Q must be positive for a bound orbit")
    Gamma = gamma_polar(p, model)
    Phi = 2.0 * (p.Theta - Gamma) + model.mu / math.sqrt(2.0 * Q)
    semilatus = (2.0 * Gamma - p.Theta) ** 2 / model.mu
    e2 = 1.0 - 2.0 * Q * semilatus / model.mu
    if e2 < -1e-12:
        raise ValueError("inconsistent Q: 1 - 2 Q p / mu < 0")
    e = math.sqrt(max(0.0, e2))
    if e < ECC_TINY:
        # perigee undefined: take g = 0 so phi carries the latitude phase
        phi = p.theta
        g = 0.0
        lam = p.t
    else:
        ecosphi = semilatus / p.r - 1.0
        esinphi = p.R * math.sqrt(semilatus / model.mu)
        # geometric eccentricity dodges the 1 - 2 Q p / mu cancellation
        e = math.hypot(ecosphi, esinphi)
        phi = math.atan2(esinphi, ecosphi)
        g = p.theta - phi
        lam = p.t - model.mu / (2.0 * Q) ** 1.5 * time_equation_defect(phi, e)
    return DSState(phi, g, node, lam, Phi, p.Theta, p.N, Q, chart="osculating",
                   e_hint=e)


def ds_to_polar(ds: DSState, model: GravityModel) -> PolarState:
    """Inverse chart map; recovers the physical epoch from the time element."""
    mu = model.mu
    Gamma = ds.G - 0.5 * (ds.Phi - mu / math.sqrt(2.0 * ds.Lam))
    semilatus = (2.0 * Gamma - ds.G) ** 2 / mu
    e = eccentricity_of(ds, model)
    denom = 1.0 + e * math.cos(ds.phi)
    if denom <= 0.0:
        raise ValueError("1 + e cos(phi) <= 0: point outside the conic branch")
    r = semilatus / denom
    R = e * math.sin(ds.phi) * math.sqrt(mu / semilatus)
    theta = ds.phi + ds.g
    defect = time_defect_from_cs(theta, e * math.cos(ds.g), e * math.sin(ds.g))
    t = ds.lam + mu / (2.0 * ds.Lam) ** 1.5 * defect
    return PolarState(r, R, theta, ds.G, ds.H, t)


def eccentricity_of(ds: DSState, model: GravityModel = _DEFAULT_MODEL) -> float:
    """Eccentricity of the state (momenta-implied unless cached exactly)."""
    if ds.e_hint is not None:
        return ds.e_hint
    mu = model.mu
    Gamma = ds.G - 0.5 * (ds.Phi - mu / math.sqrt(2.0 * ds.Lam))
    semilatus = (2.0 * Gamma - ds.G) ** 2 / mu
    return math.sqrt(max(0.0, 1.0 - 2.0 * ds.Lam * semilatus / mu))


def nonsingular_of(ds: DSState, model: GravityModel = _DEFAULT_MODEL):
    """(theta, C, S, h): argument of latitude and the eccentricity vector."""
    e = eccentricity_of(ds, model)
    return ds.phi + ds.g, e * math.cos(ds.g), e * math.sin(ds.g), ds.h


def aux_from_canonical(phi, g, Phi, G, H, Lam, model: GravityModel,
                       duv_zero: bool = False, with_u: bool = False,
                       e_hint: float | None = None) -> AuxSet:
    """Auxiliary set over an abstract scalar kind (floats or jets).

    duv_zero replaces delta and upsilon by exact zeros (the documented
    series-simplification switch); with_u additionally computes the
    eccentric-anomaly-like angle.
    """
    mu = model.mu
    Gamma = G - 0.5 * (Phi - mu / ad.sqrt(2.0 * Lam))
    two_gamma_minus = 2.0 * Gamma - G
    p = two_gamma_minus * two_gamma_minus / mu
    e2 = 1.0 - 2.0 * Lam * p / mu
    if ad.value_of(e2) < ECC_TINY * ECC_TINY:
        # exact-circular limit: freeze e at zero so e-carrying terms vanish
        # cleanly instead of producing a singular sqrt derivative
        e = 0.0 * Gamma
    else:
        e = ad.sqrt(e2)
    rho = Gamma * ad.sqrt(p / mu)
    c2 = (H / G) ** 2
    s2 = 1.0 - c2
    if e_hint is not None and not isinstance(e, float):
        e = e + (e_hint - ad.value_of(e))
    elif e_hint is not None:
        e = e_hint
    if duv_zero:
        delta = 0.0 * Gamma
        upsilon = delta
    else:
        delta = Gamma / G - 1.0
        upsilon = rho / p - 1.0
    Delta = 3.0 * (5.0 * s2 - 4.0) + 6.0 * (s2 - 1.0) * delta + 2.0 * (3.0 * s2 - 2.0) * upsilon
    u = None
    if with_u:
        half = 0.5 * phi
        u = 2.0 * ad.atan2(ad.sqrt(1.0 - e) * ad.sin(half), ad.sqrt(1.0 + e) * ad.cos(half))
    return AuxSet(Gamma, rho, p, e, s2, c2, delta, upsilon, Delta, u)


def hamiltonian_constraint(ds: DSState, model: GravityModel) -> float:
    """Residual of the extended-phase-space Hamiltonian at a consistent state.

    Vanishes (to round-off at initialization) when Lam was set to minus the
    physical energy of the osculating state.
    """
    mu = model.mu
    aux = aux_from_canonical(ds.phi, ds.g, ds.Phi, ds.G, ds.H, ds.Lam, model)
    r = aux.p / (1.0 + aux.e * math.cos(ds.phi))
    angular = 2.0 - 3.0 * aux.s2 + 3.0 * aux.s2 * math.cos(2.0 * (ds.g + ds.phi))
    return (ds.Phi - mu / math.sqrt(2.0 * ds.Lam)
            - model.j2 * (mu / r) * (model.re ** 2 / aux.Gamma) * 0.25 * angular)
