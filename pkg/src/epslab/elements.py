"""Element sets, state charts, frame conversions, and RSW error projection.

Internal units are km, km/s, s, rad throughout; angles are normalized to
(-pi, pi] on output of the chart conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Below this eccentricity the perigee direction is undefined: omega is set to 0
# and the mean anomaly absorbs the phase.
ECC_CIRCULAR = 1e-12

# Below this inclination the node is undefined: RAAN is set to 0.
INC_EQUATORIAL = 1e-12

EPOCH_MATCH_TOL = 1e-9  # s


def wrap_angle(x: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    y = math.fmod(x, TWO_PI)
    if y <= -math.pi:
        y += TWO_PI
    elif y > math.pi:
        y -= TWO_PI
    return y


@dataclass(frozen=True)
class GravityModel:
    """Main-problem gravity field: point mass plus the J2 zonal harmonic."""

    mu: float = 398600.4415  # km^3/s^2
    re: float = 6378.1363    # km
    j2: float = 1.08262617e-3

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.re <= 0.0:
            raise ValueError(f"re must be positive, got {self.re}")
        if self.j2 < 0.0:
            raise ValueError(f"j2 must be non-negative, got {self.j2}")


@dataclass(frozen=True, eq=False)
class CartesianState:
    """Inertial position/velocity at a physical epoch."""

    position: np.ndarray  # km
    velocity: np.ndarray  # km/s
    t: float = 0.0        # s

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass(frozen=True)
class PolarState:
    """Polar chart (r, R, theta, Theta, N): radius, radial velocity, argument
    of latitude, angular-momentum magnitude and its polar component."""

    r: float       # km
    R: float       # km/s
    theta: float   # rad
    Theta: float   # km^2/s
    N: float       # km^2/s
    t: float = 0.0

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError("r must be positive")
        if self.Theta <= 0.0:
            raise ValueError("Theta must be positive")
        if abs(self.N) > self.Theta * (1.0 + 1e-13):
            raise ValueError("|N| must not exceed Theta")


@dataclass(frozen=True)
class ClassicalElements:
    a: float      # km
    e: float
    inc: float    # rad
    raan: float   # rad
    argp: float   # rad
    mean_anomaly: float  # rad

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("a must be positive")
        if not 0.0 <= self.e < 1.0:
            raise ValueError("need 0 <= e < 1")
        if not 0.0 <= self.inc <= math.pi:
            raise ValueError("need 0 <= inc <= pi")


@dataclass(frozen=True)
class RswError:
    """Position error projected on the radial / along-track / cross-track frame."""

    radial: float       # km
    along_track: float  # km
    cross_track: float  # km
    rss: float          # km
    t: float = 0.0


def solve_kepler(mean_anomaly: float, e: float) -> float:
    """Solve E - e sin E = M for the eccentric anomaly.

    Newton iteration with a safeguarded start; residual below 1e-14 rad for
    all 0 <= e < 1.
    """
    if not 0.0 <= e < 1.0:
        raise ValueError("need 0 <= e < 1")
    m = wrap_angle(mean_anomaly)
    # Danby's start: third-order in e, never on the wrong side for e < 1.
    E = m + 0.85 * e * (1.0 if math.sin(m) >= 0.0 else -1.0)
    for _ in range(50):
        f = E - e * math.sin(E) - m
        fp = 1.0 - e * math.cos(E)
        dE = -f / fp
        E += dE
        if abs(dE) < 1e-15:
            break
    # polish once; guards the e -> 1 corner
    E -= (E - e * math.sin(E) - m) / (1.0 - e * math.cos(E))
    return E + (mean_anomaly - m)


def true_from_eccentric(E: float, e: float) -> float:
    """True anomaly from eccentric anomaly (same revolution)."""
    k = round(E / TWO_PI)
    Er = E - TWO_PI * k
    nu = math.atan2(math.sqrt(1.0 - e * e) * math.sin(Er), math.cos(Er) - e)
    return nu + TWO_PI * k


def eccentric_from_true(nu: float, e: float) -> float:
    """Eccentric anomaly from true anomaly (same revolution)."""
    k = round(nu / TWO_PI)
    nur = nu - TWO_PI * k
    E = math.atan2(math.sqrt(1.0 - e * e) * math.sin(nur), e + math.cos(nur))
    return E + TWO_PI * k


def classical_to_cartesian(coe: ClassicalElements, model: GravityModel, t: float = 0.0) -> CartesianState:
    """Two-body geometry: classical elements to inertial position/velocity."""
    a, e = coe.a, coe.e
    E = solve_kepler(coe.mean_anomaly, e)
    nu = true_from_eccentric(E, e)
    p = a * (1.0 - e * e)
    r = p / (1.0 + e * math.cos(nu))
    # perifocal position/velocity
    sqmp = math.sqrt(model.mu / p)
    xp = r * math.cos(nu)
    yp = r * math.sin(nu)
    vxp = -sqmp * math.sin(nu)
    vyp = sqmp * (e + math.cos(nu))
    cO, sO = math.cos(coe.raan), math.sin(coe.raan)
    ci, si = math.cos(coe.inc), math.sin(coe.inc)
    cw, sw = math.cos(coe.argp), math.sin(coe.argp)
    # rows of R3(-raan) R1(-inc) R3(-argp)
    rot = np.array([
        [cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si],
        [sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si],
        [sw * si, cw * si, ci],
    ])
    position = rot @ np.array([xp, yp, 0.0])
    velocity = rot @ np.array([vxp, vyp, 0.0])
    return CartesianState(position, velocity, t)


def cartesian_to_classical(x: CartesianState, model: GravityModel) -> ClassicalElements:
    """Inverse chart map with the circular/equatorial conventions of this module."""
    rvec, vvec = x.position, x.velocity
    r = float(np.linalg.norm(rvec))
    v2 = float(vvec @ vvec)
    energy = 0.5 * v2 - model.mu / r
    if energy >= 0.0:
        raise ValueError("state is not a bound orbit")
    a = -model.mu / (2.0 * energy)
    hvec = np.cross(rvec, vvec)
    h = float(np.linalg.norm(hvec))
    if h <= 0.0:
        raise ValueError("rectilinear orbit")
    evec = np.cross(vvec, hvec) / model.mu - rvec / r
    e = float(np.linalg.norm(evec))
    inc = math.acos(max(-1.0, min(1.0, hvec[2] / h)))

    nvec = np.array([-hvec[1], hvec[0], 0.0])  # z-hat cross h
    n = float(np.linalg.norm(nvec))
    if n < INC_EQUATORIAL * h:
        raan = 0.0
        nhat = np.array([1.0, 0.0, 0.0])
    else:
        nhat = nvec / n
        raan = math.atan2(nhat[1], nhat[0])
    mhat = np.cross(hvec / h, nhat)

    # argument of latitude is always well defined
    u = math.atan2(float(rvec @ mhat), float(rvec @ nhat))
    if e < ECC_CIRCULAR:
        argp = 0.0
        nu = u
        e = 0.0
    else:
        ehat = evec / e
        argp = math.atan2(float(ehat @ mhat), float(ehat @ nhat))
        nu = wrap_angle(u - argp)
    E = eccentric_from_true(nu, e)
    m = E - e * math.sin(E)
    return ClassicalElements(a, e, inc, wrap_angle(raan), wrap_angle(argp), wrap_angle(m))


def cartesian_to_polar(x: CartesianState) -> tuple[PolarState, float]:
    """Polar chart of a Cartesian state; returns (polar, node) with node the RAAN."""
    rvec, vvec = x.position, x.velocity
    r = float(np.linalg.norm(rvec))
    if r <= 0.0:
        raise ValueError("zero radius")
    R = float(rvec @ vvec) / r
    hvec = np.cross(rvec, vvec)
    Theta = float(np.linalg.norm(hvec))
    if Theta <= 1e-12:
        raise ValueError("rectilinear orbit: angular momentum below tolerance")
    N = float(hvec[2])
    hhat = hvec / Theta
    nvec = np.array([-hvec[1], hvec[0], 0.0])
    n = float(np.linalg.norm(nvec))
    if n < INC_EQUATORIAL * Theta:
        node = 0.0
        nhat = np.array([1.0, 0.0, 0.0])
    else:
        nhat = nvec / n
        node = math.atan2(nhat[1], nhat[0])
    mhat = np.cross(hhat, nhat)
    theta = math.atan2(float(rvec @ mhat), float(rvec @ nhat))
    return PolarState(r, R, theta, Theta, N, x.t), node


def polar_to_cartesian(p: PolarState, node: float) -> CartesianState:
    """Inverse polar chart; `node` supplies the RAAN the polar set does not carry."""
    ci = p.N / p.Theta
    ci = max(-1.0, min(1.0, ci))
    si = math.sqrt(1.0 - ci * ci)
    cO, sO = math.cos(node), math.sin(node)
    nhat = np.array([cO, sO, 0.0])
    hhat = np.array([sO * si, -cO * si, ci])
    mhat = np.cross(hhat, nhat)
    ct, st = math.cos(p.theta), math.sin(p.theta)
    rhat = ct * nhat + st * mhat
    that = -st * nhat + ct * mhat
    position = p.r * rhat
    velocity = p.R * rhat + (p.Theta / p.r) * that
    return CartesianState(position, velocity, p.t)


def main_problem_energy(x: CartesianState, model: GravityModel) -> float:
    """Hamiltonian of the main problem: v^2/2 - mu/r + J2 (mu/r)(re/r)^2 P2(z/r)."""
    r = float(np.linalg.norm(x.position))
    v2 = float(x.velocity @ x.velocity)
    slat = float(x.position[2]) / r
    p2 = 0.5 * (3.0 * slat * slat - 1.0)
    return 0.5 * v2 - model.mu / r + model.j2 * (model.mu / r) * (model.re / r) ** 2 * p2


def rsw_errors(reference: CartesianState, test: CartesianState) -> RswError:
    """Project (test - reference) position on the reference RSW frame."""
    if abs(reference.t - test.t) > EPOCH_MATCH_TOL:
        raise ValueError(
            f"epoch mismatch {reference.t - test.t:+.3e} s exceeds {EPOCH_MATCH_TOL} s"
        )
    rvec = reference.position
    r = float(np.linalg.norm(rvec))
    rhat = rvec / r
    hvec = np.cross(rvec, reference.velocity)
    what = hvec / float(np.linalg.norm(hvec))
    shat = np.cross(what, rhat)
    d = test.position - reference.position
    dr = float(d @ rhat)
    ds = float(d @ shat)
    dw = float(d @ what)
    return RswError(dr, ds, dw, math.sqrt(dr * dr + ds * ds + dw * dw), reference.t)
