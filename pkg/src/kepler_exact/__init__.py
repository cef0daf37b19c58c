"""Orbit-preserving exact discretization of the Kepler problem."""
from .core_types import (
    DegeneracyError,
    DomainError,
    EscapeError,
    InvalidArgument,
    KeplerError,
    PhysicalParams,
    PlanarVec,
    SchemeParams,
    SeedData,
    angle_between,
    validate_seed,
)
from .conic import ConicElements, conic_radius, elements_from_state, period, time_of_flight
from .discrete import (
    DiscreteOrbitParams,
    DiscreteState,
    InvariantSet,
    Trajectory,
    TrajectorySample,
    discrete_orbit_radius,
    fit_alpha_for_period,
    initial_state,
    invariants_at,
    orbit_params_from_seed,
    run_trajectory,
    seed_from_conic,
    step,
)

__all__ = [
    "angle_between",
    "conic_radius",
    "ConicElements",
    "DegeneracyError",
    "discrete_orbit_radius",
    "DiscreteOrbitParams",
    "DiscreteState",
    "DomainError",
    "elements_from_state",
    "EscapeError",
    "fit_alpha_for_period",
    "initial_state",
    "InvalidArgument",
    "invariants_at",
    "InvariantSet",
    "KeplerError",
    "orbit_params_from_seed",
    "period",
    "PhysicalParams",
    "PlanarVec",
    "run_trajectory",
    "SchemeParams",
    "seed_from_conic",
    "SeedData",
    "step",
    "time_of_flight",
    "Trajectory",
    "TrajectorySample",
    "validate_seed",
]
__version__ = "0.1.0"
