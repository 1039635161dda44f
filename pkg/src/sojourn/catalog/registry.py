from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Type

import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from ..dynamics.checks import crosscheck_nabla
from ..dynamics.system import HamiltonianSystem
from ..errors import ConfigError, NumericError
from ..models import SystemSpec
from .confined import (
    CentralForce,
    CentralForceParams,
    Pendulum,
    PendulumParams,
    PoincareBall,
    PoincareBallParams,
    RepulsiveHarmonic,
    RepulsiveHarmonicParams,
)
from .covering import OscillatorCovering, OscillatorParams, SphereCovering, SphereParams
from .flat import (
    DilationParams,
    Friedrichs,
    FriedrichsParams,
    Kinetic,
    KineticParams,
    RatioHomogeneous,
    RatioParams,
    Stark,
    StarkParams,
    build_dilation,
)

CROSSCHECK_POINTS = 5
CROSSCHECK_TOL = 1e-6


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: Type[BaseModel]
    factory: Callable[[Any, float], HamiltonianSystem]
    anchor: str
    flow: str
    chart: str = "canonical"


CATALOG: Dict[str, CatalogEntry] = {
    e.name: e
    for e in (
        CatalogEntry("friedrichs", FriedrichsParams, Friedrichs.from_params, Friedrichs.anchor, "exact"),
        CatalogEntry("stark", StarkParams, Stark.from_params, Stark.anchor, "exact"),
        CatalogEntry("kinetic", KineticParams, Kinetic.from_params, Kinetic.anchor, "exact"),
        CatalogEntry("dilation_homogeneous", DilationParams, build_dilation,
                     "flat: dilation generator (case i: |p|^alpha/alpha, case ii: inverse-square potential)",
                     "exact (case i), splitting (case ii)"),
        CatalogEntry("ratio_homogeneous", RatioParams, RatioHomogeneous.from_params,
                     RatioHomogeneous.anchor, "exact"),
        CatalogEntry("repulsive_harmonic", RepulsiveHarmonicParams, RepulsiveHarmonic.from_params,
                     RepulsiveHarmonic.anchor, "exact"),
        CatalogEntry("pendulum", PendulumParams, Pendulum.from_params, Pendulum.anchor, "splitting"),
        CatalogEntry("central_force", CentralForceParams, CentralForce.from_params,
                     CentralForce.anchor, "adaptive"),
        CatalogEntry("poincare_ball", PoincareBallParams, PoincareBall.from_params,
                     PoincareBall.anchor, "adaptive"),
        CatalogEntry("sphere_covering", SphereParams, SphereCovering.from_params,
                     SphereCovering.anchor, "exact", SphereCovering.chart),
        CatalogEntry("oscillator_covering", OscillatorParams, OscillatorCovering.from_params,
                     OscillatorCovering.anchor, "exact", OscillatorCovering.chart),
    )
}


def validate_params(spec: SystemSpec) -> BaseModel:
    entry = CATALOG.get(spec.name)
    if entry is None:
        raise ConfigError(f"unknown system {spec.name!r}; known systems: {', '.join(CATALOG)}")
    try:
        return entry.params.model_validate(spec.params)
    except ValidationError as exc:
        raise ConfigError(f"{spec.name}: invalid params: {exc}") from exc


def crosscheck(sys: HamiltonianSystem, points: int = CROSSCHECK_POINTS, seed: int = 0) -> float:
    """Compare the closed-form grad H with finite-difference brackets at random domain points."""
    if sys.nabla_h_closed(sys.sample(np.random.default_rng(seed), 1)[0]) is None:
        return 0.0
    worst = 0.0
    for z in sys.sample(np.random.default_rng(seed), points):
        gap = crosscheck_nabla(sys, z)
        worst = max(worst, gap)
        if gap > CROSSCHECK_TOL:
            raise NumericError(f"{sys.name}: closed-form grad H disagrees with the bracket "
                               f"(relative gap {gap:.2e})", {"point": z.tolist(), "gap": gap})
    logger.debug(f"{sys.name}: grad H cross-check gap {worst:.2e} over {points} points")
    return worst


def build(spec: SystemSpec, drift_budget: float = 1e-10, check: bool = True) -> HamiltonianSystem:
    params = validate_params(spec)
    sys = CATALOG[spec.name].factory(params, drift_budget)
    if check:
        crosscheck(sys)
    return sys


def listing() -> List[Dict[str, Any]]:
    """One entry per system: anchor, flow method, chart, default params and their JSON schema."""
    return [
        {
            "name": e.name,
            "anchor": e.anchor,
            "flow": e.flow,
            "chart": e.chart,
            "defaults": e.params().model_dump(mode="json"),
            "schema": e.params.model_json_schema(),
        }
        for e in CATALOG.values()
    ]
