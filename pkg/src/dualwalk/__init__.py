"""Exact random walk on the k-spherical dual of U(n+1), with urn and
Young-diagram mechanisms for the increase substep."""

from .core import (
    DimensionError,
    Distribution,
    DomainError,
    DualWalkError,
    KWeight,
    MechanismUnavailableError,
    NotInPError,
    PCoordinate,
    ResourceError,
    StateSignature,
    StructureError,
    a_sq,
    b_sq,
    enumerate_omega,
    make_state,
    state_from_wr,
    validate_interlacing,
    wr_from_state,
)

__all__ = [
    "DimensionError",
    "Distribution",
    "DomainError",
    "DualWalkError",
    "KWeight",
    "MechanismUnavailableError",
    "NotInPError",
    "PCoordinate",
    "ResourceError",
    "StateSignature",
    "StructureError",
    "a_sq",
    "b_sq",
    "enumerate_omega",
    "make_state",
    "state_from_wr",
    "validate_interlacing",
    "wr_from_state",
]

__version__ = "0.1.0"
