from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

Verdict = Literal["PASS", "FAIL", "CRITICAL", "SKIPPED", "ERROR"]


class SystemSpec(BaseModel):
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)
    notes: str = ""


class LocalisationSpec(BaseModel):
    kind: Literal["radial-smooth", "product-smooth", "characteristic-ball"] = "radial-smooth"
    dimension: int = 1
    rho: float = 4.0
    delta: float = 1.0

    @field_validator("dimension")
    @classmethod
    def _dimension_positive(cls, v):
        if v < 1:
            raise ValueError("dimension must be >= 1")
        return v

    @field_validator("rho", "delta")
    @classmethod
    def _positive(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return v


class PointSpec(BaseModel):
    id: str
    coords: List[float]
    chart: str = "canonical"


class RandomPoints(BaseModel):
    count: int = 5
    seed: Optional[int] = None


class RadiiSchedule(BaseModel):
    r0: float = 10.0
    factor: float = 2.0
    count: int = 11

    @model_validator(mode="after")
    def _increasing(self):
        if not self.r0 > 0:
            raise ValueError("radii.r0 must be > 0")
        if not self.factor > 1:
            raise ValueError("radii.factor must be > 1 (strictly increasing schedule)")
        if self.count < 4:
            raise ValueError("radii.count must be >= 4")
        return self

    def values(self) -> List[float]:
        return [self.r0 * self.factor ** k for k in range(self.count)]

    @classmethod
    def parse(cls, text: str) -> "RadiiSchedule":
        """Parse the ``"r0,xK,count"`` CLI form, e.g. ``"10,x2,11"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3 or not parts[1].lower().startswith("x"):
            raise ValueError(f"radii must look like 'r0,xK,count', got {text!r}")
        return cls(r0=float(parts[0]), factor=float(parts[1][1:]), count=int(parts[2]))


class Tolerances(BaseModel):
    quadrature: float = 1e-10
    acceptance: float = 1e-3
    critical_eps: float = 1e-8
    drift_budget: float = 1e-10

    @model_validator(mode="after")
    def _positive(self):
        for name in ("quadrature", "acceptance", "critical_eps", "drift_budget"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerances.{name} must be > 0")
        return self

    @property
    def tail(self) -> float:
        return 0.1 * self.acceptance


class RunConfig(BaseModel):
    schema_version: Literal[1] = 1
    run_name: str = "sojourn-run"
    output_dir: str = "out"
    system: Optional[SystemSpec] = None
    localisation: LocalisationSpec = Field(default_factory=LocalisationSpec)
    points: List[PointSpec] = Field(default_factory=list)
    random_points: Optional[RandomPoints] = None
    radii: RadiiSchedule = Field(default_factory=RadiiSchedule)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    discrete: bool = False
    seed: int = 0


class LimitEstimate(BaseModel):
    radii: List[float]
    values: List[float]
    truncation_times: List[float]
    limit: float
    rate: float
    method: str


class SampleDeviation(BaseModel):
    index: int
    point: List[float]
    euler_deviation: float
    scale_deviation: float


class HomogeneityReport(BaseModel):
    samples: int
    tolerance: float
    max_euler_deviation: float
    max_scale_deviation: float
    failures: List[SampleDeviation] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class AssumptionReport(BaseModel):
    max_second_difference: float
    max_linearity_residual: float
    max_nabla_variation: float
    energy_drift: float
    critical: bool = False


class TimeOperatorReport(BaseModel):
    max_residual: float
    residuals: Dict[str, float] = Field(default_factory=dict)
    skipped: bool = False
    reason: Optional[str] = None


class SojournSeries(BaseModel):
    radii: List[float]
    values: List[float]
    reference: float
    errors: List[float]
    fitted_rate: float
    truncation_times: List[float]
    limit: float
    limit_method: str
    mode: Literal["continuous", "discrete"] = "continuous"
    verdict: Verdict = "FAIL"
    tolerance: float = 1e-3

    @model_validator(mode="after")
    def _lengths_agree(self):
        n = len(self.radii)
        if not (len(self.values) == len(self.errors) == len(self.truncation_times) == n):
            raise ValueError("radii, values, errors and truncation_times must have equal lengths")
        return self


class PointDiagnostics(BaseModel):
    point_id: str
    coords: List[float]
    critical: bool = False
    nabla_h: List[float] = Field(default_factory=list)
    assumption: Optional[AssumptionReport] = None
    energy_drift: Optional[float] = None
    critical_value: Optional[float] = None
    error: Optional[str] = None


class RunRecord(BaseModel):
    run_name: str
    config: Dict[str, Any]
    point_id: str
    series: Optional[SojournSeries] = None
    diagnostics: PointDiagnostics
    verdict: Verdict
    wall_seconds: float


class SuiteResult(BaseModel):
    name: str
    status: Literal["PASS", "FAIL", "SKIPPED"]
    max_deviation: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""


class QuantumReport(BaseModel):
    dim: int
    margin: int
    expectation_A: float
    expectation_gap: float
    reference: float
    slope: float
    slope_relative_error: float
    commutation_residual: float
    certified_window: float
    max_usable_radius: float
    series: Optional[SojournSeries] = None
    critical: bool = False


class CriterionResult(BaseModel):
    number: int
    title: str
    passed: bool
    seconds: float
    detail: str = ""
