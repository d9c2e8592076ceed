"""Closed-form generating functions and secular Hamiltonian terms.

Everything is written once over an abstract scalar kind (floats give values,
jets give values plus the partials that feed the Poisson-bracket correction
machinery). Angular arguments enter only through sines/cosines of integer
combinations of phi and g, so all generators are exactly 2 pi periodic and
carry no secular part.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import adscalar as ad
from . import tables
from .dsvars import AuxSet, DSState, aux_from_canonical
from .elements import GravityModel

#: dimensionless guard on the long-period divisor
DELTA_MIN = 1e-3


class CriticalInclination(ValueError):
    """Raised when a long-period divisor falls inside the guard band."""


@dataclass(frozen=True)
class CanonicalPoint:
    """Evaluation point: the 8 canonical scalars (floats or jets) + model."""

    phi: object
    g: object
    h: object
    lam: object
    Phi: object
    G: object
    H: object
    Lam: object
    model: GravityModel
    e_hint: float | None = None

    @staticmethod
    def from_ds(ds: DSState, model: GravityModel) -> "CanonicalPoint":
        return CanonicalPoint(ds.phi, ds.g, ds.h, ds.lam,
                              ds.Phi, ds.G, ds.H, ds.Lam, model, ds.e_hint)

    @staticmethod
    def jets_from_ds(ds: DSState, model: GravityModel) -> "CanonicalPoint":
        J = ad.Jet.variable
        return CanonicalPoint(J(0, ds.phi), J(1, ds.g), J(2, ds.h), J(3, ds.lam),
                              J(4, ds.Phi), J(5, ds.G), J(6, ds.H), J(7, ds.Lam),
                              model, ds.e_hint)

    def aux(self, duv_zero: bool = False) -> AuxSet:
        return aux_from_canonical(self.phi, self.g, self.Phi, self.G, self.H,
                                  self.Lam, self.model, duv_zero=duv_zero,
                                  e_hint=self.e_hint)


def _guard_delta(aux: AuxSet, what: str) -> None:
    if abs(ad.value_of(aux.Delta)) < DELTA_MIN:
        raise CriticalInclination(
            f"{what}: |Delta| = {abs(ad.value_of(aux.Delta)):.2e} inside the "
            f"critical-inclination guard {DELTA_MIN}")


def w1(pt: CanonicalPoint, aux: AuxSet | None = None):
    """First-order short-period generator."""
    aux = aux or pt.aux()
    re2 = pt.model.re ** 2
    s2, e = aux.s2, aux.e
    phi, g2 = pt.phi, 2.0 * pt.g
    series = ((4.0 - 6.0 * s2) * e * ad.sin(phi)
              + 3.0 * e * s2 * ad.sin(g2 + phi)
              + 3.0 * s2 * ad.sin(g2 + 2.0 * phi)
              + e * s2 * ad.sin(g2 + 3.0 * phi))
    return -0.125 * aux.Gamma * (re2 / (aux.rho * aux.rho)) * series


def w2(pt: CanonicalPoint, aux: AuxSet | None = None):
    """Second-order short-period generator (nine harmonics)."""
    aux = aux or pt.aux()
    s2, e, dlt, ups = aux.s2, aux.e, aux.delta, aux.upsilon
    e2 = e * e
    sm1 = s2 - 1.0
    t32 = 3.0 * s2 - 2.0
    phi, g2, g4 = pt.phi, 2.0 * pt.g, 4.0 * pt.g
    s4 = s2 * s2

    terms = (
        60.0 * (45.0 * s4 + 72.0 * s2 - 80.0 + 168.0 * s2 * sm1 * dlt
                - 4.0 * (33.0 * s4 - 48.0 * s2 + 16.0) * ups) * e * ad.sin(phi)
        + 360.0 * ((5.0 * s2 - 4.0) * s2 + 4.0 * s2 * sm1 * dlt) * e2 * ad.sin(2.0 * phi)
        - 90.0 * (225.0 * s2 - 206.0 + 168.0 * sm1 * dlt + 4.0 * t32 * ups) * s2 * e
        * ad.sin(g2 + phi)
        - 120.0 * (39.0 * s2 - 38.0 + 36.0 * sm1 * dlt - 2.0 * t32 * ups
                   + 2.0 * e2 * (3.0 * s2 - 4.0 + 6.0 * sm1 * dlt - t32 * ups)) * s2
        * ad.sin(g2 + 2.0 * phi)
        + 10.0 * (75.0 * s2 - 42.0 - 24.0 * sm1 * dlt + 28.0 * t32 * ups) * s2 * e
        * ad.sin(g2 + 3.0 * phi)
        + 30.0 * (15.0 * s2 - 14.0 + 12.0 * sm1 * dlt) * s2 * e2 * ad.sin(g2 + 4.0 * phi)
        + 45.0 * (4.0 * ups + 5.0) * s4 * e * ad.sin(g4 + 3.0 * phi)
        + 45.0 * (2.0 * (ups + 1.0) + (2.0 * ups + 3.0) * e2) * s4 * ad.sin(g4 + 4.0 * phi)
        + 9.0 * (4.0 * ups + 5.0) * s4 * e * ad.sin(g4 + 5.0 * phi)
    )
    rho2 = aux.rho * aux.rho
    re4 = pt.model.re ** 4
    return aux.Gamma * (re4 / (rho2 * rho2)) * (1.0 / 3840.0) * terms


def v1(pt: CanonicalPoint, aux: AuxSet | None = None):
    """First-order long-period generator (small divisor Delta)."""
    aux = aux or pt.aux()
    _guard_delta(aux, "v1")
    s2, e = aux.s2, aux.e
    re2 = pt.model.re ** 2
    body = (15.0 * s2 - 14.0 + 12.0 * (s2 - 1.0) * aux.delta) * s2 * e * e
    return (aux.Gamma * (re2 / (aux.rho * aux.rho)) * (3.0 / 32.0)
            * body * ad.sin(2.0 * pt.g) / aux.Delta)


def v2(pt: CanonicalPoint, aux: AuxSet | None = None):
    """Second-order long-period generator (quadruple tabulated sum)."""
    aux = aux or pt.aux()
    _guard_delta(aux, "v2")
    s2, e = aux.s2, aux.e
    opd = 1.0 + aux.delta
    opu = 1.0 + aux.upsilon
    e2 = e * e
    # powers of (1+delta), (1+upsilon), e^2 up to what the sum needs
    dp = [1.0, opd, opd * opd, opd * opd * opd, opd * opd * opd * opd]
    up = [1.0, opu, opu * opu, opu * opu * opu, opu * opu * opu * opu]
    ep = [1.0, e2, e2 * e2]
    acc = 0.0
    for li, l in enumerate((1, 2)):
        sin2lg = ad.sin(2.0 * l * pt.g)
        s2l = s2 if l == 1 else s2 * s2
        for k in range(0, 3 - l):
            ekl = ep[k + l]
            partial = 0.0
            for j in range(5):
                for i in range(5 - j):
                    coef = tables.long_period_b(l, k, i, j, s2)
                    if isinstance(coef, float) and coef == 0.0:
                        continue
                    partial = partial + coef * dp[i] * up[j]
            acc = acc + partial * ekl * s2l * sin2lg
    rho2 = aux.rho * aux.rho
    re4 = pt.model.re ** 4
    d3 = aux.Delta * aux.Delta * aux.Delta
    return aux.Gamma * (re4 / (rho2 * rho2)) * (3.0 / 1024.0) * acc / d3


def f_secular(pt: CanonicalPoint, m: int, aux: AuxSet | None = None):
    """Secular Hamiltonian term of order m in {1, 2, 3} (mean variables)."""
    aux = aux or pt.aux()
    s2, e = aux.s2, aux.e
    re2 = pt.model.re ** 2
    rho2 = aux.rho * aux.rho
    if m == 1:
        return aux.Gamma * (re2 / rho2) * 0.25 * (3.0 * s2 - 2.0)
    if m == 2:
        e2 = e * e
        s4 = s2 * s2
        body = (4.0 * (15.0 * s4 - 6.0 * s2 - 4.0)
                + 3.0 * (5.0 * s4 + 8.0 * s2 - 8.0) * e2
                + 24.0 * s2 * (2.0 * e2 + 3.0) * (s2 - 1.0) * aux.delta
                - 2.0 * (e2 + 1.0) * (15.0 * s4 - 24.0 * s2 + 8.0) * aux.upsilon)
        return aux.Gamma * (re2 * re2 / (rho2 * rho2)) * (1.0 / 64.0) * body
    if m == 3:
        _guard_delta(aux, "f_secular(m=3)")
        opd = 1.0 + aux.delta
        opu = 1.0 + aux.upsilon
        e2 = e * e
        dp = [1.0, opd, opd * opd, opd * opd * opd, opd * opd * opd * opd]
        up = [1.0, opu, opu * opu, opu * opu * opu, opu * opu * opu * opu]
        ep = [1.0, e2, e2 * e2]
        acc = 0.0
        for k in range(3):
            partial = 0.0
            for j in range(5):
                for i in range(5 - j):
                    coef = tables.third_order_q(k, i, j, s2)
                    if isinstance(coef, float) and coef == 0.0:
                        continue
                    partial = partial + coef * dp[i] * up[j]
            acc = acc + partial * ep[k]
        re6 = re2 * re2 * re2
        rho6 = rho2 * rho2 * rho2
        return (aux.Gamma * (re6 / rho6) * (3.0 / 1024.0)
                * acc / (aux.Delta * aux.Delta))
    raise ValueError(f"secular order must be 1, 2 or 3, got {m}")


def secular_hamiltonian(pt: CanonicalPoint, max_m: int, aux: AuxSet | None = None):
    """Full mean-element Hamiltonian Phi - mu/sqrt(2 Lam) + sum J2^m/m! F_m."""
    aux = aux or pt.aux()
    mu = pt.model.mu
    j2 = pt.model.j2
    acc = pt.Phi - mu / ad.sqrt(2.0 * pt.Lam)
    fact = 1.0
    for m in range(1, max_m + 1):
        fact *= m
        acc = acc + (j2 ** m / fact) * f_secular(pt, m, aux)
    return acc


def brouwer_v2star(G, p, e, s2, g, model: GravityModel):
    """Second-order long-period generator of the physical-time comparison
    theory (size comparator only; never composed into a propagation).
    """
    dtil = 5.0 * s2 - 4.0
    if abs(ad.value_of(dtil)) < DELTA_MIN:
        raise CriticalInclination(
            f"brouwer_v2star: |5 s^2 - 4| = {abs(ad.value_of(dtil)):.2e} inside guard")
    eta = ad.sqrt(1.0 - e * e)
    re4 = model.re ** 4
    p2 = p * p
    acc = 0.0
    for j in (1, 2):
        jstar = j % 2
        inner = 0.0
        for i in range(3 * jstar + 1):
            inner = inner + tables.comparison_b(j, i, s2)
        ej = e ** (2 * j)
        sj = s2 ** j
        etaj = eta ** j
        acc = acc + ((1.0 + eta) ** (j - 2) / dtil ** (j - 1)) * inner * etaj * ej * sj \
            * ad.sin(2.0 * j * g)
    return G * (re4 / (p2 * p2)) * (1.0 / 1024.0) * acc / (dtil * dtil)
