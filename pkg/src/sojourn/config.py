from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

from .errors import ConfigError, DomainError
from .locfn.functions import LocalisationFunction
from .models import LocalisationSpec, PointSpec, RadiiSchedule, RunConfig

yaml = YAML(typ="safe")


class Settings(BaseSettings):
    """Process-level knobs read from ``SOJOURN_*`` environment variables or ``.env``."""

    model_config = SettingsConfigDict(env_prefix="SOJOURN_", env_file=".env", extra="ignore")

    workers: int = 4
    log_level: str = "INFO"
    progress: bool = True


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a run configuration (JSON, or any YAML superset of it) and validate it."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except YAMLError as exc:
        raise ConfigError(f"config {path} is not valid JSON/YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must be a mapping at the top level")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


def apply_overrides(cfg: RunConfig, *, out: Optional[str] = None, seed: Optional[int] = None,
                    radii: Optional[str] = None, tol: Optional[float] = None,
                    discrete: Optional[bool] = None) -> RunConfig:
    """Return a copy of ``cfg`` with the CLI flags applied on top of the file values."""
    data = cfg.model_dump()
    if out is not None:
        data["output_dir"] = out
    if seed is not None:
        data["seed"] = seed
        if data.get("random_points") is not None:
            data["random_points"]["seed"] = seed
    if radii is not None:
        try:
            data["radii"] = RadiiSchedule.parse(radii).model_dump()
        except (ValueError, ValidationError) as exc:
            raise ConfigError(f"--radii: {exc}") from exc
    if tol is not None:
        data["tolerances"]["acceptance"] = tol
    if discrete is not None:
        data["discrete"] = discrete
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid overrides: {exc}") from exc


def localisation_function(spec: LocalisationSpec) -> LocalisationFunction:
    try:
        return LocalisationFunction(spec.kind, spec.dimension, spec.rho, spec.delta)
    except DomainError as exc:
        raise ConfigError(f"localisation: {exc}") from exc


def resolve_points(cfg: RunConfig, system) -> List[PointSpec]:
    """Configured points plus ``random_points`` drawn from the system's sampler, in a fixed order."""
    points = list(cfg.points)
    if cfg.random_points is not None and cfg.random_points.count > 0:
        seed = cfg.seed if cfg.random_points.seed is None else cfg.random_points.seed
        rng = np.random.default_rng(seed)
        for i, z in enumerate(system.sample(rng, cfg.random_points.count)):
            points.append(PointSpec(id=f"random-{i:03d}", coords=[float(c) for c in z], chart=system.chart))
    if not points:
        raise ConfigError("config lists no points (neither points nor random_points)")
    ids = [p.id for p in points]
    if len(set(ids)) != len(ids):
        raise ConfigError("point ids must be unique")
    return points
