"""Explicit orbit-preserving discretization of the Kepler problem.

Points are generated on a lattice of constant polar step ``Delta = 2*delta``.
The time step adapts so that the angle stays fixed, and every trajectory
keeps discrete analogues of angular momentum, energy and the Runge-Lenz
vector exactly (up to round-off). The inverse radius then obeys an exact
discrete harmonic oscillator, so the points lie on a conic; with the
exactness seeding of :func:`seed_from_conic` that conic is the continuous one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Sequence

from .conic import ConicElements, conic_radius, period
from .core_types import (
    DegeneracyError,
    DomainError,
    EscapeError,
    InvalidArgument,
    PhysicalParams,
    PlanarVec,
    SchemeParams,
    SeedData,
    angle_between,
    perp_scale,
    validate_seed,
)

ANGLE_TOL = 1e-10
IDENTITY_RTOL = 1e-12
CIRCULAR_EPS = 1e-13

CORRECTED = "corrected"
# cos(delta) where the step geometry needs cos(Delta); kept to show the invariant drift
PRINTED = "printed"
VARIANTS = (CORRECTED, PRINTED)


@dataclass(frozen=True)
class DiscreteState:
    """Rolling window ``(r[n-1], r[n], dt[n-1])`` plus the time ``t[n]``.

    ``seed_const`` is ``k dt0**2 / (m r1**2 r0**2 alpha cos(delta))``, frozen
    from the seed so the time-step recursion never depends on drifted values.
    """

    n: int
    r_prev: PlanarVec
    r_curr: PlanarVec
    dt_prev: float
    t_curr: float
    seed_const: float

    def momentum(self, phys: PhysicalParams) -> PlanarVec:
        """Discrete momentum ``m (r[n] - r[n-1]) / dt[n-1]``."""
        return (self.r_curr - self.r_prev) * (phys.m / self.dt_prev)


@dataclass(frozen=True)
class InvariantSet:
    L_z: float
    E: float
    A: PlanarVec


@dataclass(frozen=True)
class BisectorPoint:
    R_vec: PlanarVec
    R: float


@dataclass(frozen=True)
class DiscreteOrbitParams:
    """Discrete orbit ``r[n] = cal_P / (cos(delta) + eps cos(n Delta - theta0))``."""

    cal_L: float
    cal_E: float
    cal_P: float
    eps: float
    theta0: float


@dataclass(frozen=True)
class TrajectorySample:
    n: int
    t: float
    r: PlanarVec
    radius: float
    phi: float
    dt: Optional[float]
    inv: InvariantSet
    orbit_residual: float


@dataclass
class Trajectory:
    samples: list[TrajectorySample]
    orbit: DiscreteOrbitParams
    escaped: bool = False
    escape_reason: Optional[str] = None

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[TrajectorySample]:
        return iter(self.samples)

    def __getitem__(self, i: int) -> TrajectorySample:
        return self.samples[i]


def initial_state(seed: SeedData, scheme: SchemeParams, phys: PhysicalParams) -> DiscreteState:
    validate_seed(seed, scheme)
    r0, r1 = seed.r0.norm(), seed.r1.norm()
    seed_const = phys.k * seed.dt0**2 / (
        phys.m * r1 * r1 * r0 * r0 * scheme.alpha * math.cos(scheme.delta)
    )
    return DiscreteState(
        n=1, r_prev=seed.r0, r_curr=seed.r1, dt_prev=seed.dt0, t_curr=seed.dt0,
        seed_const=seed_const,
    )


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise InvalidArgument(f"unknown variant {variant!r}")


def timestep_next(
    state: DiscreteState,
    scheme: SchemeParams,
    phys: PhysicalParams,
    variant: str = CORRECTED,
) -> float:
    """Time step ``dt[n]`` that keeps the polar angle between ``r[n]`` and ``r[n+1]`` at ``Delta``."""
    _check_variant(variant)
    rp, rc = state.r_prev.norm(), state.r_curr.norm()
    c = math.cos(scheme.cap_delta if variant == CORRECTED else scheme.delta)
    den = 2.0 * c * rp / rc - 1.0 + state.seed_const * rp
    if not (den > 0.0 and math.isfinite(den)):
        raise EscapeError(
            f"time-step denominator {den!r} is not positive at n={state.n}: "
            "the next point would leave the orbit branch"
        )
    return state.dt_prev / den


def position_next(
    state: DiscreteState,
    dt_n: float,
    scheme: SchemeParams,
    phys: PhysicalParams,
    check: bool = True,
) -> PlanarVec:
    """Vector form of the three-point recurrence, solved for ``r[n+1]``."""
    if not (dt_n > 0.0 and math.isfinite(dt_n)) or not state.dt_prev > 0.0:
        raise DegeneracyError(f"time steps must be positive, got dt_n={dt_n!r}")
    rp, rc = state.r_prev.norm(), state.r_curr.norm()
    dtp = state.dt_prev
    B = 1.0 / dt_n + 1.0 / dtp - phys.k * dtp / (
        scheme.alpha * phys.m * rc * rc * rp * math.cos(scheme.delta)
    )
    x = dt_n * (B * state.r_curr.x - state.r_prev.x / dtp)
    y = dt_n * (B * state.r_curr.y - state.r_prev.y / dtp)
    r_next = PlanarVec(x, y)
    rn = r_next.norm()
    if not (rn > 0.0 and math.isfinite(rn)):
        raise DegeneracyError(f"degenerate radius {rn!r} at n={state.n + 1}")
    if check:
        ang = angle_between(state.r_curr, r_next)
        if abs(ang - scheme.cap_delta) > ANGLE_TOL:
            raise DegeneracyError(
                f"step angle {ang!r} differs from Delta={scheme.cap_delta!r} at n={state.n}"
            )
        lhs, rhs = rn * dtp, rp * dt_n
        if abs(lhs - rhs) > IDENTITY_RTOL * max(abs(lhs), abs(rhs)):
            raise DegeneracyError(f"radius/time-step identity violated at n={state.n}")
    return r_next


def position_next_rotation(
    state: DiscreteState, dt_n: float, scheme: SchemeParams, variant: str = CORRECTED
) -> PlanarVec:
    """Scalar form of the same step.

    The radius comes from ``r[n+1] dt[n-1] = r[n-1] dt[n]``. The direction is
    ``r_hat[n]`` turned by ``Delta`` in the sense of motion, which is the
    bisector identity ``r_hat[n+1] + r_hat[n-1] = 2 cos(Delta) r_hat[n]``.
    The printed variant applies that identity with ``cos(delta)``.
    """
    _check_variant(variant)
    if not (dt_n > 0.0 and math.isfinite(dt_n)):
        raise DegeneracyError(f"time steps must be positive, got dt_n={dt_n!r}")
    rp, rc = state.r_prev.norm(), state.r_curr.norm()
    radius = rp * dt_n / state.dt_prev
    if variant == CORRECTED:
        big_d = math.copysign(scheme.cap_delta, state.r_prev.cross(state.r_curr))
        c, s = math.cos(big_d), math.sin(big_d)
        x, y = state.r_curr
        turned = PlanarVec(c * x - s * y, s * x + c * y)
        # rescale by the turned norm: c*c + s*s != 1 in binary64 would otherwise
        # bias every radius the same way and drift the invariants secularly
        r_next = turned * (radius / turned.norm())
    else:
        u_prev, u_curr = state.r_prev * (1.0 / rp), state.r_curr * (1.0 / rc)
        direction = u_curr * (2.0 * math.cos(scheme.delta)) - u_prev
        r_next = direction * (radius / direction.norm())
    if not (radius > 0.0 and math.isfinite(radius)):
        raise DegeneracyError(f"degenerate radius {radius!r} at n={state.n + 1}")
    return r_next


def step(
    state: DiscreteState,
    scheme: SchemeParams,
    phys: PhysicalParams,
    variant: str = CORRECTED,
    form: str = "rotation",
) -> DiscreteState:
    """Advance the window by one point.

    ``form="rotation"`` (default) builds ``r[n+1]`` with
    :func:`position_next_rotation`. ``form="vector"`` uses the three-point
    vector recurrence of :func:`position_next`. Both agree on any single step,
    but chained vector steps do not hold the step angle at ``Delta``: off that
    constraint perturbations grow by a constant factor per revolution on
    eccentric orbits, so long runs must use the rotation form.
    """
    dt_n = timestep_next(state, scheme, phys, variant)
    if form == "rotation":
        r_next = position_next_rotation(state, dt_n, scheme, variant)
    elif form == "vector":
        r_next = position_next(state, dt_n, scheme, phys, check=variant == CORRECTED)
    else:
        raise InvalidArgument(f"unknown step form {form!r}")
    return replace(
        state,
        n=state.n + 1,
        r_prev=state.r_curr,
        r_curr=r_next,
        dt_prev=dt_n,
        t_curr=state.t_curr + dt_n,
    )


def bisector_point(r_n: PlanarVec, r_next: PlanarVec) -> BisectorPoint:
    """Point midway between the tips of the two vectors scaled to a common harmonic radius."""
    a, b = r_n.norm(), r_next.norm()
    R_vec = (r_n * b + r_next * a) * (1.0 / (a + b))
    return BisectorPoint(R_vec=R_vec, R=R_vec.norm())


def angular_momentum_direct(
    r_n: PlanarVec, r_next: PlanarVec, dt_n: float, scheme: SchemeParams, phys: PhysicalParams
) -> float:
    """``L_z = alpha m (r[n] x r[n+1]) / dt[n]`` without the bisector point."""
    return scheme.alpha * phys.m * r_n.cross(r_next) / dt_n


def invariants_at(
    r_n: PlanarVec,
    r_next: PlanarVec,
    dt_n: float,
    scheme: SchemeParams,
    phys: PhysicalParams,
    check: bool = True,
) -> InvariantSet:
    """Discrete angular momentum, energy and Runge-Lenz vector of the pair ``(r[n], r[n+1])``."""
    m, k, alpha = phys.m, phys.k, scheme.alpha
    p = (r_next - r_n) * (m / dt_n)
    bis = bisector_point(r_n, r_next)
    L_z = alpha * bis.R_vec.cross(p)
    if check:
        L_direct = angular_momentum_direct(r_n, r_next, dt_n, scheme, phys)
        if abs(L_z - L_direct) > IDENTITY_RTOL * abs(L_direct):
            raise DegeneracyError(
                f"angular momentum forms disagree: {L_z!r} vs {L_direct!r}"
            )
    E = p.dot(p) / (2.0 * m) - k / (alpha * bis.R)
    A = perp_scale(p, L_z) * (1.0 / m) - bis.R_vec * (k / bis.R)
    return InvariantSet(L_z=L_z, E=E, A=A)


def u_transform(radius: float, params: DiscreteOrbitParams, scheme: SchemeParams) -> float:
    """Shifted inverse radius ``1/r - alpha k m cos(delta) / cal_L**2``."""
    return 1.0 / radius - math.cos(scheme.delta) / params.cal_P


def orbit_params_from_seed(
    seed: SeedData, scheme: SchemeParams, phys: PhysicalParams
) -> DiscreteOrbitParams:
    validate_seed(seed, scheme)
    inv = invariants_at(seed.r0, seed.r1, seed.dt0, scheme, phys)
    cal_L = abs(inv.L_z)
    cal_P = cal_L * cal_L / (phys.k * phys.m * scheme.alpha)
    base = math.cos(scheme.delta) / cal_P
    u0 = 1.0 / seed.r0.norm() - base
    u1 = 1.0 / seed.r1.norm() - base
    big_d = scheme.cap_delta
    s = (u1 - u0 * math.cos(big_d)) / math.sin(big_d)
    # amplitude of u; equals eps / cal_P and stays accurate as eps -> 0
    eps = cal_P * math.hypot(u0, s)
    theta0 = math.atan2(s, u0) if eps >= CIRCULAR_EPS else 0.0
    return DiscreteOrbitParams(cal_L=cal_L, cal_E=inv.E, cal_P=cal_P, eps=eps, theta0=theta0)


def discrete_orbit_radius(n: int, params: DiscreteOrbitParams, scheme: SchemeParams) -> float:
    den = math.cos(scheme.delta) + params.eps * math.cos(n * scheme.cap_delta - params.theta0)
    if den <= 0.0:
        raise DomainError(f"index {n} lies beyond the unbound orbit branch")
    return params.cal_P / den


def orbit_residual(
    n: int, radius: float, params: DiscreteOrbitParams, scheme: SchemeParams
) -> float:
    """Relative miss of ``radius`` from the discrete orbit formula at index ``n``."""
    den = math.cos(scheme.delta) + params.eps * math.cos(n * scheme.cap_delta - params.theta0)
    return abs(radius * den - params.cal_P) / params.cal_P


def radial_oscillator_residuals(
    u_seq: Sequence[float], scheme: SchemeParams
) -> tuple[float, float, float]:
    """Oscillator recurrence residual and the spread of the two discrete energy forms."""
    if len(u_seq) < 3:
        raise InvalidArgument("need at least three u values")
    d, big_d = scheme.delta, scheme.cap_delta
    four_s2 = (2.0 * math.sin(d)) ** 2
    c, s = math.cos(big_d), math.sin(big_d)
    rec = max(
        abs((u_seq[i + 1] - 2.0 * u_seq[i] + u_seq[i - 1]) / four_s2 + u_seq[i])
        for i in range(1, len(u_seq) - 1)
    )
    q15 = [
        (u_seq[i + 1] - u_seq[i]) ** 2 / four_s2 + u_seq[i + 1] * u_seq[i]
        for i in range(len(u_seq) - 1)
    ]
    q16 = [
        ((u_seq[i + 1] - u_seq[i] * c) / s) ** 2 + u_seq[i] ** 2
        for i in range(len(u_seq) - 1)
    ]
    return rec, max(abs(q - q15[0]) for q in q15), max(abs(q - q16[0]) for q in q16)


def radial_oscillator_check(u_seq: Sequence[float], scheme: SchemeParams) -> float:
    return max(radial_oscillator_residuals(u_seq, scheme))


def seed_from_conic(
    conic: ConicElements, phi_init: float, scheme: SchemeParams, phys: PhysicalParams
) -> SeedData:
    """Seed whose whole discrete trajectory lies on ``conic``, moving counterclockwise.

    The discrete orbit parameters come out as ``cal_P = p cos(delta)`` and
    ``eps = e cos(delta)``, which puts every lattice point on the conic.
    """
    phi1 = phi_init + scheme.cap_delta
    r0 = PlanarVec.polar(conic_radius(phi_init, conic), phi_init)
    r1 = PlanarVec.polar(conic_radius(phi1, conic), phi1)
    L = math.sqrt(phys.k * phys.m * conic.p)
    cal_L = L * math.sqrt(scheme.alpha * math.cos(scheme.delta))
    dt0 = scheme.alpha * phys.m * r0.norm() * r1.norm() * math.sin(scheme.cap_delta) / cal_L
    return SeedData(r0=r0, r1=r1, dt0=dt0)


def fit_alpha_for_period(
    conic: ConicElements,
    n_per_rev: int,
    phys: PhysicalParams,
    phi_init: Optional[float] = None,
) -> float:
    """``alpha`` making one discrete revolution of ``n_per_rev`` steps last one period.

    Under exactness seeding the radii do not depend on ``alpha`` and every
    time step scales as ``sqrt(alpha)``, so the fit is closed form. The
    revolution starts at ``phi_init`` (perihelion by default).
    """
    if conic.e >= 1.0:
        raise DomainError("period fitting needs a bound orbit (e < 1)")
    if n_per_rev < 5:
        raise InvalidArgument(f"n_per_rev must be >= 5 so that delta < pi/4, got {n_per_rev}")
    start = conic.phi0 if phi_init is None else phi_init
    delta = math.pi / n_per_rev
    radii = [conic_radius(start + 2.0 * delta * i, conic) for i in range(n_per_rev + 1)]
    total = math.fsum(radii[i] * radii[i + 1] for i in range(n_per_rev))
    L = math.sqrt(phys.k * phys.m * conic.p)
    root = period(conic, phys) * L / (
        2.0 * phys.m * math.sin(delta) * math.sqrt(math.cos(delta)) * total
    )
    return root * root


def run_trajectory(
    seed: SeedData,
    scheme: SchemeParams,
    phys: PhysicalParams,
    n_steps: int,
    variant: str = CORRECTED,
) -> Trajectory:
    """Samples ``0..n_steps`` with per-sample invariants.

    Stops early, with ``escaped`` set, when the next point would leave the
    branch of an unbound orbit. Each sample's invariants come from the pair
    ``(r[n], r[n+1])``; the last sample uses ``(r[n-1], r[n])``.
    """
    if n_steps < 0:
        raise InvalidArgument("n_steps must be >= 0")
    _check_variant(variant)
    check = variant == CORRECTED
    params = orbit_params_from_seed(seed, scheme, phys)
    state = initial_state(seed, scheme, phys)
    points = [seed.r0, seed.r1]
    dts = [seed.dt0]
    times = [0.0, seed.dt0]
    escaped, reason = False, None
    while len(points) <= n_steps:
        try:
            state = step(state, scheme, phys, variant)
        except EscapeError as exc:
            escaped, reason = True, str(exc)
            break
        points.append(state.r_curr)
        dts.append(state.dt_prev)
        times.append(state.t_curr)

    last = min(n_steps, len(points) - 1)
    samples = []
    for i in range(last + 1):
        if i < last or last == 0:
            inv = invariants_at(points[i], points[i + 1], dts[i], scheme, phys, check)
        r = points[i]
        radius = r.norm()
        samples.append(
            TrajectorySample(
                n=i,
                t=times[i],
                r=r,
                radius=radius,
                phi=r.angle(),
                dt=dts[i] if i < last else None,
                inv=inv,
                orbit_residual=orbit_residual(i, radius, params, scheme),
            )
        )
    return Trajectory(samples=samples, orbit=params, escaped=escaped, escape_reason=reason)
