"""Desk-scale acceptance suite behind ``sojourn accept``.

Each criterion is a function returning a ``CriterionResult``; sample counts
are parameters so the test-suite can run reduced versions.
"""
import tempfile
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from .catalog.registry import CATALOG, build
from .config import Settings, localisation_function
from .dynamics.checks import check_assumption, check_time_operator, energy_drift
from .dynamics.system import FlowKind
from .engine import converge
from .errors import SojournError
from .locfn.functions import characteristic_ball, product_smooth, radial_smooth
from .locfn.pairs import pair_limit_continuous, pair_limit_discrete
from .locfn.rfunc import check_homogeneity, grad_Rf
from .models import CriterionResult, LocalisationSpec, SuiteResult, SystemSpec
from .presets import EXACT_FLOW_SYSTEMS, NUMERIC_FLOW_SYSTEMS, preset
from .quantum import verify_quantum
from .runner import run_sojourn

TIME_OPERATOR_TIMES = (-10.0, -5.0, -1.0, 1.0, 5.0, 10.0)
ASSUMPTION_GRID = np.linspace(-10.0, 10.0, 21)
# Orbit accuracy of the numeric integrators at the default drift budget.
INTEGRATOR_TOL = 1e-8
PAIR_RADII = (10.0, 20.0, 40.0, 80.0)


def _random_nonzero(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    x = rng.normal(0.0, 2.0, size=(count, d))
    x[np.linalg.norm(x, axis=-1) < 1e-3] += 1.0
    return x


def _result(number: int, title: str, started: float, passed: bool, detail: str,
            budget: float = float("inf")) -> CriterionResult:
    seconds = time.time() - started
    if seconds > budget:
        passed = False
        detail += f"; runtime {seconds:.1f}s over {budget:g}s"
    return CriterionResult(number=number, title=title, passed=passed, seconds=seconds, detail=detail)


def rf_homogeneity(seed: int = 0, samples: int = 50) -> CriterionResult:
    started = time.time()
    rng = np.random.default_rng(seed)
    worst, failures = 0.0, 0
    for f in (radial_smooth(1), radial_smooth(2), product_smooth(2), product_smooth(3)):
        report = check_homogeneity(f, _random_nonzero(rng, samples, f.dimension), tol=1e-7)
        worst = max(worst, report.max_euler_deviation)
        failures += len(report.failures)
    return _result(1, "R_f homogeneity", started, failures == 0,
                   f"max |x.grad R_f + 1| = {worst:.2e}, failures {failures}", budget=10.0)


def radial_closed_form(seed: int = 0, samples: int = 20) -> CriterionResult:
    started = time.time()
    rng = np.random.default_rng(seed)
    exact = True
    gap = 0.0
    f1, p1, f2 = radial_smooth(1), product_smooth(1), radial_smooth(2)
    for x in _random_nonzero(rng, samples, 2):
        exact &= bool(np.array_equal(grad_Rf(f2, x), -x / float(x @ x)))
        gap = max(gap, float(np.max(np.abs(grad_Rf(f2, x, method="quadrature") + x / float(x @ x)))))
        x1 = x[:1]
        exact &= bool(np.array_equal(grad_Rf(f1, x1), -x1 / float(x1 @ x1)))
        gap = max(gap, float(np.max(np.abs(grad_Rf(p1, x1) + x1 / float(x1 @ x1)))))
    return _result(2, "radial closed form of grad R_f", started, exact and gap < 1e-7,
                   f"closed form exact: {exact}, quadrature gap {gap:.2e}")


def ball_pair_limit(seed: int = 0, samples: int = 20) -> CriterionResult:
    started = time.time()
    rng = np.random.default_rng(seed)
    f = characteristic_ball(2)
    worst = 0.0
    for x, y in zip(_random_nonzero(rng, samples, 2), _random_nonzero(rng, samples, 2)):
        est = pair_limit_continuous(f, x, y, PAIR_RADII)
        worst = max(worst, abs(est.limit - float(x @ y) / float(y @ y)))
    return _result(3, "characteristic-ball pair limit", started, worst < 1e-6,
                   f"max |limit - x.y/|y|^2| = {worst:.2e}", budget=30.0)


def discrete_agreement(seed: int = 0, samples: int = 10) -> CriterionResult:
    started = time.time()
    rng = np.random.default_rng(seed)
    f = radial_smooth(2)
    worst = 0.0
    for x, y in zip(_random_nonzero(rng, samples, 2), _random_nonzero(rng, samples, 2)):
        cont = pair_limit_continuous(f, x, y, PAIR_RADII).limit
        disc = pair_limit_discrete(f, x, y, PAIR_RADII).limit
        worst = max(worst, abs(cont - disc))
    return _result(4, "discrete/continuous pair agreement", started, worst < 1e-4,
                   f"max |discrete - continuous| = {worst:.2e}")


def _preset_sweep(keys: List[str], points: int, seed: int,
                  with_drift: bool = False) -> Tuple[bool, List[str]]:
    ok, lines = True, []
    for key in keys:
        cfg = preset(key)
        sys = build(cfg.system, drift_budget=cfg.tolerances.drift_budget)
        f = localisation_function(cfg.localisation)
        for i, z in enumerate(sys.sample(np.random.default_rng(seed), points)):
            label = f"{key}[{i}]"
            try:
                series = converge(sys, f, z, cfg.radii, tolerances=cfg.tolerances, discrete=cfg.discrete)
                drift = energy_drift(sys, z, max(series.truncation_times)) if with_drift else 0.0
            except SojournError as exc:
                ok = False
                lines.append(f"{label}: {type(exc).__name__}: {exc}")
                continue
            rel = abs(series.limit - series.reference) / max(1.0, abs(series.reference))
            passed = series.verdict == "PASS"
            if with_drift:
                passed &= drift < 1e-9
                lines.append(f"{label}: rel {rel:.2e}, drift {drift:.1e}, {series.verdict}")
            else:
                lines.append(f"{label}: rel {rel:.2e}, {series.verdict}")
            ok &= passed
    return ok, lines


def exact_flow_formula(seed: int = 0, points: int = 5, keys: Optional[List[str]] = None) -> CriterionResult:
    started = time.time()
    ok, lines = _preset_sweep(keys or EXACT_FLOW_SYSTEMS, points, seed)
    return _result(5, "sojourn limit, exact flows", started, ok, "; ".join(lines), budget=300.0)


def numeric_flow_formula(seed: int = 0, points: int = 3, keys: Optional[List[str]] = None) -> CriterionResult:
    started = time.time()
    ok, lines = _preset_sweep(keys or NUMERIC_FLOW_SYSTEMS, points, seed, with_drift=True)
    return _result(6, "sojourn limit, numeric flows", started, ok, "; ".join(lines))


def _catalog_systems():
    for name in CATALOG:
        if name == "dilation_homogeneous":
            yield build(SystemSpec(name=name, params={"case": "i"}))
            yield build(SystemSpec(name=name, params={"case": "ii"}))
        else:
            yield build(SystemSpec(name=name))


def time_operator_law(seed: int = 0, points: int = 3) -> CriterionResult:
    started = time.time()
    ok, worst = True, {}
    for sys in _catalog_systems():
        f = radial_smooth(sys.d)
        bound = 1e-6 if sys.flow_kind is FlowKind.exact else 1e-4
        for z in sys.sample(np.random.default_rng(seed), points):
            report = check_time_operator(sys, f, z, TIME_OPERATOR_TIMES)
            if report.skipped:
                continue
            worst[sys.anchor] = max(worst.get(sys.anchor, 0.0), report.max_residual)
            ok &= report.max_residual < bound
    if not worst:
        return _result(7, "time-operator law", started, False, "no non-critical point evaluated")
    detail = "; ".join(f"{k}: {v:.1e}" for k, v in worst.items())
    return _result(7, "time-operator law", started, ok, detail)


def assumption_suite(seed: int = 0, points: int = 2) -> CriterionResult:
    started = time.time()
    ok, worst = True, {}
    for sys in _catalog_systems():
        bound = 1e-8 if sys.flow_kind is FlowKind.exact else 10 * INTEGRATOR_TOL
        for z in sys.sample(np.random.default_rng(seed), points):
            report = check_assumption(sys, z, ASSUMPTION_GRID)
            worst[sys.anchor] = max(worst.get(sys.anchor, 0.0), report.max_second_difference)
            ok &= report.max_second_difference < bound
    detail = "; ".join(f"{k}: {v:.1e}" for k, v in worst.items())
    return _result(8, "commutation assumption", started, ok, detail)


def discrete_formula(seed: int = 0, points: int = 3) -> CriterionResult:
    started = time.time()
    ok, lines = _preset_sweep(["kinetic_discrete", "friedrichs_discrete"], points, seed)
    return _result(9, "discrete-time sojourn limit", started, ok, "; ".join(lines))


def quantum_check(dim: int = 512, margin: int = 32) -> CriterionResult:
    started = time.time()
    report = verify_quantum(dim, margin)
    ok = (report.commutation_residual < 1e-12 and report.slope_relative_error < 0.01
          and report.series is not None and report.series.verdict == "PASS")
    limit = report.series.limit if report.series else float("nan")
    detail = (f"residual {report.commutation_residual:.1e}, slope error {report.slope_relative_error:.1e}, "
              f"limit {limit:.6g} vs {report.reference:.6g}, window {report.certified_window:g}")
    return _result(10, "truncated shift system", started, ok, detail, budget=60.0)


def determinism(seed: int = 0, key: str = "kinetic", points: int = 2) -> CriterionResult:
    started = time.time()
    settings = Settings(workers=4, progress=False)
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for run in ("a", "b"):
            cfg = preset(key)
            cfg.output_dir = str(Path(tmp) / run)
            cfg.seed = seed
            cfg.random_points.count = points
            cfg.radii.count = 5
            outcome = run_sojourn(cfg, settings)
            digests.append(outcome.results_path.read_bytes())
    return _result(11, "byte-stable results.csv", started, digests[0] == digests[1],
                   f"{len(digests[0])} bytes per run")


CRITERIA: Dict[int, Callable[[int], CriterionResult]] = {
    1: rf_homogeneity,
    2: radial_closed_form,
    3: ball_pair_limit,
    4: discrete_agreement,
    5: exact_flow_formula,
    6: numeric_flow_formula,
    7: time_operator_law,
    8: assumption_suite,
    9: discrete_formula,
    10: lambda seed: quantum_check(),
    11: determinism,
}


def run_acceptance(only: Optional[List[int]] = None, seed: int = 0) -> List[CriterionResult]:
    results = []
    for number, check in CRITERIA.items():
        if only and number not in only:
            continue
        try:
            res = check(seed)
        except SojournError as exc:
            res = CriterionResult(number=number, title=f"criterion {number}", passed=False, seconds=0.0,
                                  detail=f"{type(exc).__name__}: {exc}")
        logger.info(f"[{number:2d}] {'PASS' if res.passed else 'FAIL'} {res.title} ({res.seconds:.1f}s)")
        results.append(res)
    return results


# Localisation-function suites for ``sojourn verify-rf``, run on the configured f.

def _suite(name: str, deviation: float, tolerance: float, detail: str = "") -> SuiteResult:
    status = "PASS" if deviation < tolerance else "FAIL"
    return SuiteResult(name=name, status=status, max_deviation=deviation, tolerance=tolerance, detail=detail)


def verify_rf_suites(spec: LocalisationSpec, seed: int = 0, samples: int = 20) -> List[SuiteResult]:
    f = localisation_function(spec)
    rng = np.random.default_rng(seed)
    out = []

    report = check_homogeneity(f, _random_nonzero(rng, samples, f.dimension), tol=1e-7)
    out.append(_suite("homogeneity", report.max_euler_deviation, 1e-7,
                      f"scale deviation {report.max_scale_deviation:.2e}"))

    if f.is_radial and f.is_smooth:
        gap = 0.0
        for x in _random_nonzero(rng, samples, f.dimension):
            closed = grad_Rf(f, x)
            gap = max(gap, float(np.max(np.abs(grad_Rf(f, x, method="quadrature") - closed))))
            if not np.array_equal(closed, -x / float(x @ x)):
                gap = float("inf")
        out.append(_suite("radial closed form", gap, 1e-7))
    else:
        out.append(SuiteResult(name="radial closed form", status="SKIPPED",
                               detail=f"{f.kind.value} has no quadrature cross-check of the closed form"))

    pair_tol = 1e-6 if not f.is_smooth else 1e-4
    worst = 0.0
    pairs = list(zip(_random_nonzero(rng, samples // 2, f.dimension), _random_nonzero(rng, samples // 2, f.dimension)))
    for x, y in pairs:
        est = pair_limit_continuous(f, x, y, PAIR_RADII)
        worst = max(worst, abs(est.limit + float(x @ grad_Rf(f, y))))
    out.append(_suite("pair limit", worst, pair_tol))

    if not f.has_second_derivatives:
        out.append(SuiteResult(name="discrete/continuous agreement", status="SKIPPED",
                               detail="unsupported: the discrete sum needs a C^2 localisation function"))
    else:
        worst = 0.0
        for x, y in pairs:
            cont = pair_limit_continuous(f, x, y, PAIR_RADII).limit
            disc = pair_limit_discrete(f, x, y, PAIR_RADII).limit
            worst = max(worst, abs(cont - disc))
        out.append(_suite("discrete/continuous agreement", worst, 1e-4))
    for s in out:
        logger.info(f"verify-rf {s.name}: {s.status} ({s.detail or s.max_deviation})")
    return out
