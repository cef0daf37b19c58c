"""Shared value types, validation and planar vector arithmetic.

Motion in a central field stays in the plane fixed by the angular momentum,
so positions and momenta are 2-vectors and angular momentum is the signed
out-of-plane scalar ``L_z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

SEED_ANGLE_TOL = 1e-12


class KeplerError(Exception):
    """Base class for all library errors."""


class InvalidArgument(KeplerError, ValueError):
    pass


class DomainError(KeplerError, ValueError):
    """Input lies outside the branch where a formula is defined."""


class EscapeError(DomainError):
    """The discrete point would leave the valid branch of an unbound orbit."""


class DegeneracyError(DomainError):
    """Zero radius, nonpositive step or a violated step postcondition."""


class PlanarVec(NamedTuple):
    x: float
    y: float

    def __add__(self, other: PlanarVec) -> PlanarVec:  # type: ignore[override]
        return PlanarVec(self.x + other.x, self.y + other.y)

    def __sub__(self, other: PlanarVec) -> PlanarVec:
        return PlanarVec(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> PlanarVec:  # type: ignore[override]
        return PlanarVec(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> PlanarVec:
        return PlanarVec(-self.x, -self.y)

    def dot(self, other: PlanarVec) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: PlanarVec) -> float:
        """Out-of-plane component of the 3D cross product."""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def angle(self) -> float:
        """Polar angle in (-pi, pi]."""
        return math.atan2(self.y, self.x)

    def rotated(self, theta: float) -> PlanarVec:
        c, s = math.cos(theta), math.sin(theta)
        return PlanarVec(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)

    @classmethod
    def polar(cls, radius: float, phi: float) -> PlanarVec:
        return cls(radius * math.cos(phi), radius * math.sin(phi))


def perp_scale(v: PlanarVec, lz: float) -> PlanarVec:
    """In-plane part of ``v x (lz * e_z)``."""
    return PlanarVec(v.y * lz, -v.x * lz)


@dataclass(frozen=True)
class PhysicalParams:
    """Mass ``m`` and force strength ``k`` (force is ``-k r_hat / r**2``)."""

    m: float = 1.0
    k: float = 1.0

    def __post_init__(self) -> None:
        if not (self.m > 0 and math.isfinite(self.m)):
            raise InvalidArgument(f"mass must be positive, got {self.m!r}")
        if not (self.k > 0 and math.isfinite(self.k)):
            raise InvalidArgument(f"force strength must be positive, got {self.k!r}")


@dataclass(frozen=True)
class SchemeParams:
    """Scheme constant ``alpha`` and half step angle ``delta``.

    ``cap_delta`` is the polar angle swept per step and always equals ``2*delta``.
    """

    alpha: float
    delta: float
    cap_delta: float = field(init=False)

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidArgument(f"alpha must be positive, got {self.alpha!r}")
        if not (0.0 < self.delta < math.pi / 4):
            raise InvalidArgument(f"delta must lie in (0, pi/4), got {self.delta!r}")
        object.__setattr__(self, "cap_delta", 2.0 * self.delta)

    @classmethod
    def from_steps_per_rev(cls, n_per_rev: int, alpha: float = 1.0) -> SchemeParams:
        if n_per_rev < 5:
            # delta = pi/N must stay below pi/4
            raise InvalidArgument(f"steps per revolution must be >= 5, got {n_per_rev}")
        return cls(alpha=alpha, delta=math.pi / n_per_rev)


@dataclass(frozen=True)
class SeedData:
    r0: PlanarVec
    r1: PlanarVec
    dt0: float


def angle_between(a: PlanarVec, b: PlanarVec) -> float:
    """Unsigned angle between two nonzero vectors, in [0, pi]."""
    if a.norm() == 0.0 or b.norm() == 0.0:
        raise InvalidArgument("angle_between needs nonzero vectors")
    # abs() of the cross keeps the result symmetric in (a, b)
    return math.atan2(abs(a.cross(b)), a.dot(b))


def validate_seed(seed: SeedData, scheme: SchemeParams) -> None:
    """Raise :class:`InvalidArgument` naming the first seed invariant that fails."""
    for name, v in (("r0", seed.r0), ("r1", seed.r1)):
        if not v.is_finite():
            raise InvalidArgument(f"{name} has non-finite components")
        if v.norm() == 0.0:
            raise InvalidArgument(f"zero radius: {name} has zero length")
    if not (seed.dt0 > 0 and math.isfinite(seed.dt0)):
        raise InvalidArgument(f"nonpositive dt0: {seed.dt0!r}")
    ang = angle_between(seed.r0, seed.r1)
    if abs(ang - scheme.cap_delta) > SEED_ANGLE_TOL:
        raise InvalidArgument(
            f"angle mismatch: angle(r0, r1) = {ang!r}, expected 2*delta = {scheme.cap_delta!r}"
        )
