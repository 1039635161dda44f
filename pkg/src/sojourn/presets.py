"""Built-in run configurations, one per catalog system (mirrored by ``configs/*.json``)."""
from typing import Dict, List, Optional

from .errors import ConfigError
from .models import LocalisationSpec, RadiiSchedule, RandomPoints, RunConfig, SystemSpec, Tolerances

EXACT_FLOW_SYSTEMS = [
    "friedrichs", "stark", "kinetic", "ratio_homogeneous", "repulsive_harmonic",
    "sphere_covering", "oscillator_covering", "dilation_homogeneous",
]
NUMERIC_FLOW_SYSTEMS = ["pendulum", "central_force", "poincare_ball", "dilation_inverse_square"]

_LONG = RadiiSchedule(r0=10.0, factor=2.0, count=11)
_SHORT = RadiiSchedule(r0=5.0, factor=2.0, count=4)
_NUMERIC_TOL = Tolerances(acceptance=1e-2, drift_budget=1e-11)


def _smooth(d: int, kind: str = "radial-smooth") -> LocalisationSpec:
    return LocalisationSpec(kind=kind, dimension=d, rho=4.0, delta=1.0)


def _ball(d: int = 1) -> LocalisationSpec:
    return LocalisationSpec(kind="characteristic-ball", dimension=d)


def _preset(key: str, system: str, params: Dict, localisation: LocalisationSpec,
            radii: RadiiSchedule = _LONG, tolerances: Optional[Tolerances] = None,
            discrete: bool = False, count: int = 5) -> RunConfig:
    return RunConfig(
        run_name=key,
        output_dir=f"out/{key}",
        system=SystemSpec(name=system, params=params),
        localisation=localisation,
        random_points=RandomPoints(count=count),
        radii=radii,
        tolerances=tolerances or Tolerances(),
        discrete=discrete,
    )


PRESETS: Dict[str, RunConfig] = {
    "friedrichs": _preset("friedrichs", "friedrichs", {"v": [1.0, 0.5]}, _smooth(2)),
    "stark": _preset("stark", "stark", {"v": [1.0]}, _smooth(1)),
    "kinetic": _preset("kinetic", "kinetic", {"n": 2}, _smooth(2, "product-smooth")),
    "ratio_homogeneous": _preset("ratio_homogeneous", "ratio_homogeneous", {}, _smooth(1)),
    "repulsive_harmonic": _preset("repulsive_harmonic", "repulsive_harmonic", {"n": 1, "K": 0.1},
                                  _ball(), _SHORT),
    "sphere_covering": _preset("sphere_covering", "sphere_covering", {}, _smooth(1)),
    "oscillator_covering": _preset("oscillator_covering", "oscillator_covering", {"n": 2}, _smooth(2)),
    "dilation_homogeneous": _preset("dilation_homogeneous", "dilation_homogeneous",
                                    {"case": "i", "n": 2, "alpha": 3.0}, _smooth(1)),
    "pendulum": _preset("pendulum", "pendulum", {"K": 1.0}, _ball(), _SHORT, _NUMERIC_TOL, count=3),
    "central_force": _preset("central_force", "central_force", {"n": 2, "K": 1.0, "branch": "0"},
                             _ball(), _SHORT, _NUMERIC_TOL, count=3),
    "poincare_ball": _preset("poincare_ball", "poincare_ball", {"n": 2}, _ball(),
                             RadiiSchedule(r0=0.1, factor=2.0, count=4), _NUMERIC_TOL, count=3),
    "dilation_inverse_square": _preset("dilation_inverse_square", "dilation_homogeneous",
                                       {"case": "ii", "n": 2, "K": 1.0}, _ball(), _SHORT,
                                       _NUMERIC_TOL, count=3),
    "kinetic_discrete": _preset("kinetic_discrete", "kinetic", {"n": 2}, _smooth(2, "product-smooth"),
                                RadiiSchedule(r0=10.0, factor=2.0, count=7), discrete=True, count=3),
    "friedrichs_discrete": _preset("friedrichs_discrete", "friedrichs", {"v": [1.0, 0.5]}, _smooth(2),
                                   RadiiSchedule(r0=10.0, factor=2.0, count=7), discrete=True, count=3),
}


def preset(key: str) -> RunConfig:
    try:
        return PRESETS[key].model_copy(deep=True)
    except KeyError:
        raise ConfigError(f"unknown preset {key!r}; known presets: {', '.join(PRESETS)}") from None


def preset_names() -> List[str]:
    return list(PRESETS)
