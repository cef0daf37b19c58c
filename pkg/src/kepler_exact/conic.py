"""Continuous Kepler orbits: conic geometry, integrals of motion, time of flight.

Serves as ground truth for the discrete scheme. Elapsed time between true
anomalies comes from the anomaly form of Kepler's equation (Barker's equation
near the parabola); the inverse problem uses a safeguarded Newton solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core_types import (
    DomainError,
    InvalidArgument,
    KeplerError,
    PhysicalParams,
    PlanarVec,
    perp_scale,
)

PARABOLIC_BAND = 1e-8
KEPLER_TOL = 1e-13
KEPLER_MAXITER = 80
_CIRCULAR_E = 1e-14


@dataclass(frozen=True)
class ConicElements:
    """Planar conic ``r = p / (1 + e cos(phi - phi0))`` with its integrals.

    ``a`` is ``None`` for the parabola and ``T`` is ``None`` for unbound orbits.
    ``L`` is signed, positive for counterclockwise motion.
    """

    p: float
    e: float
    phi0: float
    E: float
    L: float
    a: Optional[float]
    T: Optional[float]

    @classmethod
    def from_shape(
        cls, p: float, e: float, phi0: float = 0.0, phys: PhysicalParams = PhysicalParams()
    ) -> ConicElements:
        if not (p > 0 and math.isfinite(p)):
            raise InvalidArgument(f"semi-latus rectum must be positive, got {p!r}")
        if not (e >= 0 and math.isfinite(e)):
            raise InvalidArgument(f"eccentricity must be >= 0, got {e!r}")
        L = math.sqrt(phys.k * phys.m * p)
        E = (e * e - 1.0) * phys.k / (2.0 * p)
        a = None if e == 1.0 else p / (1.0 - e * e)
        T = None
        if e < 1.0:
            T = 2.0 * math.pi * math.sqrt(phys.m * a**3 / phys.k)
        return cls(p=p, e=e, phi0=phi0, E=E, L=L, a=a, T=T)


def conic_radius(phi: float, conic: ConicElements) -> float:
    den = 1.0 + conic.e * math.cos(phi - conic.phi0)
    if den <= 0.0:
        raise DomainError(f"angle {phi!r} is outside the orbit branch")
    return conic.p / den


def conic_velocity(phi: float, conic: ConicElements, phys: PhysicalParams) -> PlanarVec:
    """Velocity at polar angle ``phi`` for the orbit sense given by the sign of ``L``."""
    nu = phi - conic.phi0
    s = math.copysign(1.0, conic.L)
    vr = s * phys.k / abs(conic.L) * conic.e * math.sin(nu)
    vt = s * phys.k / abs(conic.L) * (1.0 + conic.e * math.cos(nu))
    c, sn = math.cos(phi), math.sin(phi)
    return PlanarVec(vr * c - vt * sn, vr * sn + vt * c)


def runge_lenz(r: PlanarVec, v: PlanarVec, phys: PhysicalParams) -> PlanarVec:
    p = v * phys.m
    lz = r.cross(p)
    return perp_scale(p, lz) * (1.0 / phys.m) - r * (phys.k / r.norm())


def elements_from_state(r: PlanarVec, v: PlanarVec, phys: PhysicalParams) -> ConicElements:
    rn = r.norm()
    if rn == 0.0:
        raise InvalidArgument("position must be nonzero")
    L = phys.m * r.cross(v)
    if L == 0.0:
        raise KeplerError("radial orbit (zero angular momentum) is not supported")
    E = 0.5 * phys.m * v.dot(v) - phys.k / rn
    A = runge_lenz(r, v, phys)
    # |A|/k avoids the cancellation in sqrt(1 + 2EL^2/(mk^2)) for small e
    e = A.norm() / phys.k
    phi0 = A.angle() if e > _CIRCULAR_E else 0.0
    p = L * L / (phys.k * phys.m)
    a = None if e == 1.0 else p / (1.0 - e * e)
    T = 2.0 * math.pi * math.sqrt(phys.m * a**3 / phys.k) if e < 1.0 else None
    return ConicElements(p=p, e=e, phi0=phi0, E=E, L=L, a=a, T=T)


def period(conic: ConicElements, phys: PhysicalParams) -> float:
    if conic.e >= 1.0:
        raise DomainError("period is defined only for bound (e < 1) orbits")
    a = conic.p / (1.0 - conic.e**2)
    return 2.0 * math.pi * math.sqrt(phys.m * a**3 / phys.k)


def _x_minus_sin(x: float) -> float:
    if abs(x) < 0.5:
        x2 = x * x
        term, total, n = x * x2 / 6.0, 0.0, 3
        while abs(term) > 1e-18 * abs(x * x2):
            total += term
            term *= -x2 / ((n + 1) * (n + 2))
            n += 2
        return total
    return x - math.sin(x)


def _sinh_minus_x(x: float) -> float:
    if abs(x) < 0.5:
        x2 = x * x
        term, total, n = x * x2 / 6.0, 0.0, 3
        while abs(term) > 1e-18 * abs(x * x2):
            total += term
            term *= x2 / ((n + 1) * (n + 2))
            n += 2
        return total
    return math.sinh(x) - x


def _near_parabolic(D: float, beta: float) -> float:
    """Barker's equation plus the first two orders in ``beta = (1-e)/(1+e)``."""
    D2 = D * D
    return (
        D / 2.0
        + D * D2 / 6.0
        - beta * D * (D2 * D2 - 5.0) / 5.0
        + beta * beta * D * (15.0 * D2**3 - 7.0 * D2 * D2 - 35.0 * D2 + 35.0) / 70.0
    )


def _near_parabolic_slope(D: float, beta: float) -> float:
    D2 = D * D
    return (
        0.5
        + D2 / 2.0
        - beta * (D2 * D2 - 1.0)
        + beta * beta * (105.0 * D2**3 - 35.0 * D2 * D2 - 105.0 * D2 + 35.0) / 70.0
    )


def _time_since_periapsis(nu: float, conic: ConicElements, phys: PhysicalParams) -> float:
    """Signed time from periapsis to true anomaly ``nu`` (|nu| < pi, inside the branch)."""
    e, p = conic.e, conic.p
    scale = math.sqrt(phys.m * p**3 / phys.k)
    D = math.tan(nu / 2.0)
    if abs(e - 1.0) < PARABOLIC_BAND:
        return scale * _near_parabolic(D, (1.0 - e) / (1.0 + e))
    if e < 1.0:
        E_anom = 2.0 * math.atan(math.sqrt((1.0 - e) / (1.0 + e)) * D)
        # E - e sin E split so that both parts keep full precision as e -> 1
        M = _x_minus_sin(E_anom) + (1.0 - e) * math.sin(E_anom)
        return scale * M / (1.0 - e * e) ** 1.5
    H = 2.0 * math.atanh(math.sqrt((e - 1.0) / (e + 1.0)) * D)
    M = _sinh_minus_x(H) + (e - 1.0) * math.sinh(H)
    return scale * M / (e * e - 1.0) ** 1.5


def _branch_half_width(e: float) -> float:
    return math.pi if e < 1.0 else math.acos(-1.0 / e)


def time_of_flight(
    conic: ConicElements, phi_a: float, phi_b: float, phys: PhysicalParams
) -> float:
    """Time to move from polar angle ``phi_a`` to ``phi_b >= phi_a`` in the direction of motion.

    Bound orbits accept any span (whole revolutions included). Unbound orbits
    require both true anomalies inside the open branch around periapsis.
    """
    if phi_b < phi_a:
        raise InvalidArgument("phi_b must be >= phi_a")
    if phi_a == phi_b:
        return 0.0
    nu_a, nu_b = phi_a - conic.phi0, phi_b - conic.phi0
    if conic.e < 1.0 and abs(conic.e - 1.0) >= PARABOLIC_BAND:
        T = period(conic, phys)

        def t_of(nu: float) -> float:
            k = math.floor((nu + math.pi) / (2.0 * math.pi))
            return _time_since_periapsis(nu - 2.0 * math.pi * k, conic, phys) + k * T

        return t_of(nu_b) - t_of(nu_a)
    half = _branch_half_width(conic.e)
    for nu in (nu_a, nu_b):
        if not (-half < nu < half):
            raise DomainError(f"true anomaly {nu!r} is outside the unbound branch")
    return _time_since_periapsis(nu_b, conic, phys) - _time_since_periapsis(nu_a, conic, phys)


def solve_kepler(mean_anomaly: float, e: float) -> float:
    """Eccentric (e < 1) or hyperbolic (e > 1) anomaly for a given mean anomaly.

    Newton iteration safeguarded by a shrinking bracket; falls back to
    bisection whenever a Newton step leaves the bracket.
    """
    M = mean_anomaly
    if e < 1.0:
        f = lambda x: x - e * math.sin(x) - M  # noqa: E731
        df = lambda x: 1.0 - e * math.cos(x)  # noqa: E731
        lo, hi = M - e, M + e
        x = M
    elif e > 1.0:
        f = lambda x: e * math.sinh(x) - x - M  # noqa: E731
        df = lambda x: e * math.cosh(x) - 1.0  # noqa: E731
        # e sinh H - H >= (e - 1) sinh H for H >= 0
        bound = math.asinh(abs(M) / (e - 1.0))
        lo, hi = -bound, bound
        x = math.asinh(M / e)
    else:
        raise DomainError("solve_kepler needs e != 1; use Barker's equation for parabolas")
    for _ in range(KEPLER_MAXITER):
        fx = f(x)
        if fx > 0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        d = df(x)
        x_new = x - fx / d if d != 0.0 else 0.5 * (lo + hi)
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= KEPLER_TOL * max(1.0, abs(x_new)):
            return x_new
        x = x_new
    raise KeplerError(f"Kepler solver did not converge for M={M!r}, e={e!r}")


def true_anomaly_at_time(
    conic: ConicElements, t: float, phys: PhysicalParams
) -> float:
    """True anomaly reached ``t`` time units after periapsis passage."""
    e, p = conic.e, conic.p
    if abs(e - 1.0) < PARABOLIC_BAND:
        # Barker: D^3 + 3 D = 6 t / sqrt(m p^3/k), Cardano root, then Newton on the series
        tau = t / math.sqrt(phys.m * p**3 / phys.k)
        w = 3.0 * tau
        y = (w + math.sqrt(w * w + 1.0)) ** (1.0 / 3.0)
        D = y - 1.0 / y
        beta = (1.0 - e) / (1.0 + e)
        for _ in range(3):
            D -= (_near_parabolic(D, beta) - tau) / _near_parabolic_slope(D, beta)
        return 2.0 * math.atan(D)
    a = abs(p / (1.0 - e * e))
    n = math.sqrt(phys.k / (phys.m * a**3))
    M = n * t
    if e < 1.0:
        k = math.floor((M + math.pi) / (2.0 * math.pi))
        E_anom = solve_kepler(M - 2.0 * math.pi * k, e)
        nu = 2.0 * math.atan(math.sqrt((1.0 + e) / (1.0 - e)) * math.tan(E_anom / 2.0))
        return nu + 2.0 * math.pi * k
    H = solve_kepler(M, e)
    return 2.0 * math.atan(math.sqrt((e + 1.0) / (e - 1.0)) * math.tanh(H / 2.0))
