"""Fixed-step classical integrators for the continuous Kepler problem.

These are the drift foils: explicit Euler gains energy every step, RK4 drifts
slowly but secularly, and kick-drift-kick leapfrog keeps a bounded
energy error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core_types import DegeneracyError, InvalidArgument, PhysicalParams, PlanarVec

METHODS = ("explicit-euler", "leapfrog", "rk4")
_R_MIN = 1e-150


@dataclass(frozen=True)
class PhaseState:
    r: PlanarVec
    v: PlanarVec
    t: float = 0.0


def acceleration(r: PlanarVec, phys: PhysicalParams) -> PlanarVec:
    rn = r.norm()
    if not rn > _R_MIN:
        raise DegeneracyError("collision singularity: |r| underflowed")
    return r * (-phys.k / (phys.m * rn**3))


def energy_of(s: PhaseState, phys: PhysicalParams) -> float:
    return 0.5 * phys.m * s.v.dot(s.v) - phys.k / s.r.norm()


def angular_momentum_of(s: PhaseState, phys: PhysicalParams) -> float:
    return phys.m * s.r.cross(s.v)


def reference_step(method: str, s: PhaseState, dt: float, phys: PhysicalParams) -> PhaseState:
    if not dt > 0:
        raise InvalidArgument(f"dt must be positive, got {dt!r}")
    r, v = s.r, s.v
    if method == "explicit-euler":
        a = acceleration(r, phys)
        return PhaseState(r + v * dt, v + a * dt, s.t + dt)
    if method == "leapfrog":
        v_half = v + acceleration(r, phys) * (0.5 * dt)
        r_new = r + v_half * dt
        return PhaseState(r_new, v_half + acceleration(r_new, phys) * (0.5 * dt), s.t + dt)
    if method == "rk4":
        k1r, k1v = v, acceleration(r, phys)
        k2r = v + k1v * (0.5 * dt)
        k2v = acceleration(r + k1r * (0.5 * dt), phys)
        k3r = v + k2v * (0.5 * dt)
        k3v = acceleration(r + k2r * (0.5 * dt), phys)
        k4r = v + k3v * dt
        k4v = acceleration(r + k3r * dt, phys)
        w = dt / 6.0
        return PhaseState(
            r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * w,
            v + (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * w,
            s.t + dt,
        )
    raise InvalidArgument(f"unknown method {method!r}; expected one of {METHODS}")


def integrate(
    method: str, s: PhaseState, dt: float, n_steps: int, phys: PhysicalParams
) -> list[PhaseState]:
    out = [s]
    for _ in range(n_steps):
        s = reference_step(method, s, dt, phys)
        out.append(s)
    return out


def max_energy_drift(states: list[PhaseState], phys: PhysicalParams) -> float:
    e0 = energy_of(states[0], phys)
    return max(abs(energy_of(s, phys) - e0) for s in states)


def secular_energy_drift(states: list[PhaseState], phys: PhysicalParams) -> float:
    """``|E(end) - E(0)|``."""
    return abs(energy_of(states[-1], phys) - energy_of(states[0], phys))


def is_finite_state(s: PhaseState) -> bool:
    return s.r.is_finite() and s.v.is_finite() and math.isfinite(s.t)
