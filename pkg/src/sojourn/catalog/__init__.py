from ..numerics.elliptic import complete_K, elliptic_F
from .confined import CentralForce, Pendulum, PoincareBall, RepulsiveHarmonic
from .covering import OscillatorCovering, SphereCovering
from .flat import (
    Dispersion,
    Friedrichs,
    HomogeneousDilation,
    InverseSquareDilation,
    Kinetic,
    RatioHomogeneous,
    Stark,
)
from .registry import CATALOG, build, crosscheck, listing, validate_params

__all__ = [
    "CATALOG",
    "CentralForce",
    "Dispersion",
    "Friedrichs",
    "HomogeneousDilation",
    "InverseSquareDilation",
    "Kinetic",
    "OscillatorCovering",
    "Pendulum",
    "PoincareBall",
    "RatioHomogeneous",
    "RepulsiveHarmonic",
    "SphereCovering",
    "Stark",
    "build",
    "complete_K",
    "crosscheck",
    "elliptic_F",
    "listing",
    "validate_params",
]
