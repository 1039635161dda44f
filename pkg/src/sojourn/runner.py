"""Run driver behind ``sojourn sojourn``: fans (point, r) work items out to a
thread pool, then writes results.csv, records.jsonl and the report tables."""
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger
from tqdm import tqdm

from .catalog.registry import build
from .config import Settings, localisation_function, resolve_points
from .dynamics.brackets import nabla_H
from .dynamics.checks import T_f_observable, check_assumption, energy_drift
from .dynamics.system import HamiltonianSystem, PhasePoint
from .engine import SojournOptions, discrete_horizon, judge, radii_values, sojourn_at, summarise
from .errors import ConfigError, FlowError, NumericError, SojournError
from .exporters.jsonl_writer import JSONLWriter
from .exporters.stats import Stats, read_results, write_results
from .locfn.functions import LocalisationFunction
from .models import PointDiagnostics, PointSpec, RunConfig, RunRecord, SojournSeries, Tolerances, Verdict
from .numerics.extrapolate import extrapolate_power_tail

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

ASSUMPTION_GRID = np.linspace(-10.0, 10.0, 21)


@dataclass
class PreparedPoint:
    spec: PointSpec
    z: np.ndarray
    critical: bool
    nabla: np.ndarray
    reference: float


@dataclass
class RunOutcome:
    exit_code: int
    records: List[RunRecord] = field(default_factory=list)
    results_path: Optional[Path] = None
    plan: List[Dict] = field(default_factory=list)


def prepare(cfg: RunConfig) -> Tuple[HamiltonianSystem, LocalisationFunction, List[PreparedPoint]]:
    """Build the system, f and the point list; every problem here is a configuration error."""
    if cfg.system is None:
        raise ConfigError("config names no system")
    sys = build(cfg.system, drift_budget=cfg.tolerances.drift_budget)
    f = localisation_function(cfg.localisation)
    if f.dimension != sys.d:
        raise ConfigError(f"localisation.dimension is {f.dimension} but {sys.name} has d = {sys.d}")
    if cfg.discrete and not f.has_second_derivatives:
        raise ConfigError("discrete mode needs a C^2 localisation function, not the characteristic function")
    radii_values(cfg.radii)
    opts = SojournOptions.from_tolerances(cfg.tolerances)
    prepared = []
    for spec in resolve_points(cfg, sys):
        z = sys.require(PhasePoint(spec.coords, spec.chart, spec.id))
        grad = nabla_H(sys, z)
        critical = bool(np.linalg.norm(grad) < opts.critical_eps)
        reference = float("nan") if critical else T_f_observable(sys, f, z, opts.critical_eps, opts.quadrature_tol)
        if critical:
            logger.warning(f"{spec.id}: critical point, routed to the diagnostic mode")
        prepared.append(PreparedPoint(spec, z, critical, grad, reference))
    return sys, f, prepared


def plan(sys: HamiltonianSystem, f: LocalisationFunction, points: List[PreparedPoint], cfg: RunConfig) -> List[Dict]:
    """The (point, r) work items with the window each would integrate over."""
    opts = SojournOptions.from_tolerances(cfg.tolerances, diagnose=True)
    items = []
    for p in points:
        phi0 = np.asarray(sys.phi(p.z), dtype=float).reshape(sys.d)
        for r in cfg.radii.values():
            if cfg.discrete:
                t_star = float(discrete_horizon(sys, f, p.z, r, opts))
            elif p.critical:
                t_star = max(1.0, r)
            else:
                t_star = f.truncation_time(phi0, p.nabla, r, opts.tail_tol)
            items.append({"point_id": p.spec.id, "r": r, "t_star": t_star, "critical": p.critical})
    return items


def _diagnostics(sys: HamiltonianSystem, p: PreparedPoint, window: float) -> PointDiagnostics:
    diag = PointDiagnostics(point_id=p.spec.id, coords=[float(c) for c in p.z], critical=p.critical,
                            nabla_h=[float(g) for g in p.nabla])
    try:
        diag.assumption = check_assumption(sys, p.z, ASSUMPTION_GRID)
        if math.isfinite(window):
            diag.energy_drift = energy_drift(sys, p.z, window)
    except SojournError as exc:
        diag.error = f"diagnostics: {exc}"
    return diag


def run_sojourn(cfg: RunConfig, settings: Optional[Settings] = None, dry_run: bool = False) -> RunOutcome:
    settings = settings or Settings()
    sys, f, points = prepare(cfg)
    radii = radii_values(cfg.radii)
    mode = "discrete" if cfg.discrete else "continuous"

    if dry_run:
        items = plan(sys, f, points, cfg)
        logger.info(f"DRY RUN: {len(items)} work items for {sys.name}, nothing is written")
        for it in items:
            logger.info(f"  would compute {it['point_id']} r={it['r']:g} t*={it['t_star']:.6g}"
                        + (" (critical)" if it["critical"] else ""))
        return RunOutcome(EXIT_OK, plan=items)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stats = Stats()
    start = time.time()

    work = [(i, k) for i in range(len(points)) for k in range(len(radii))]
    results: Dict[Tuple[int, int], Tuple[float, float]] = {}
    failures: Dict[int, BaseException] = {}

    def task(i: int, k: int):
        p = points[i]
        opts = SojournOptions.from_tolerances(cfg.tolerances, diagnose=p.critical)
        t0 = time.time()
        value, t_star = sojourn_at(sys, f, p.z, radii[k], opts, cfg.discrete)
        return value, t_star, time.time() - t0

    timings: Dict[int, float] = {}
    with ThreadPoolExecutor(max_workers=max(1, settings.workers)) as pool:
        futures = {pool.submit(task, i, k): (i, k) for i, k in work}
        for fut in tqdm(as_completed(futures), total=len(futures), desc=sys.name, disable=not settings.progress):
            i, k = futures[fut]
            try:
                value, t_star, seconds = fut.result()
            except Exception as exc:
                pid = points[i].spec.id
                if isinstance(exc, FlowError):
                    stage = "flow"
                elif isinstance(exc, NumericError):
                    stage = "quadrature"
                else:
                    stage = "sojourn"
                stats.add_error(sys.name, pid, stage, f"r={radii[k]:g}: {exc}")
                logger.error(f"{pid} r={radii[k]:g}: {exc}")
                failures.setdefault(i, exc)
                continue
            results[(i, k)] = (value, t_star)
            timings[i] = timings.get(i, 0.0) + seconds

    rows, records = [], []
    writer = JSONLWriter(out_dir / "records.jsonl")
    config_echo = cfg.model_dump(mode="json")
    exit_code = EXIT_OK
    for i, p in enumerate(points):
        pid = p.spec.id
        series: Optional[SojournSeries] = None
        verdict: Verdict
        if i in failures:
            verdict = "ERROR"
            exit_code = max(exit_code, EXIT_NUMERIC if isinstance(failures[i], NumericError) else EXIT_FAIL)
        else:
            values = [results[(i, k)][0] for k in range(len(radii))]
            times = [results[(i, k)][1] for k in range(len(radii))]
            if p.critical:
                series = summarise(sys.name, radii, values, times, 0.0, cfg.tolerances, cfg.discrete)
                series = series.model_copy(update={"verdict": "CRITICAL"})
            else:
                series = summarise(sys.name, radii, values, times, p.reference, cfg.tolerances, cfg.discrete)
            verdict = series.verdict
            if verdict == "FAIL":
                exit_code = max(exit_code, EXIT_FAIL)
            for r, v, t in zip(radii, values, times):
                rows.append({"point_id": pid, "r": r, "value": v, "T_f": p.reference,
                             "abs_error": abs(v - (0.0 if p.critical else p.reference)),
                             "t_star": t, "mode": mode, "acceptance": cfg.tolerances.acceptance,
                             "tail": cfg.tolerances.tail})

        diag = _diagnostics(sys, p, max(series.truncation_times) if series else 1.0)
        if failures.get(i) is not None:
            diag.error = str(failures[i])
        if p.critical and series is not None:
            diag.critical_value = max(abs(v) for v in series.values)
        rec = RunRecord(run_name=cfg.run_name, config=config_echo, point_id=pid, series=series,
                        diagnostics=diag, verdict=verdict, wall_seconds=timings.get(i, 0.0))
        writer.append(rec)
        records.append(rec)
        stats.add_summary({
            "point_id": pid,
            "verdict": verdict,
            "T_f": p.reference,
            "limit": series.limit if series else float("nan"),
            "limit_method": series.limit_method if series else "",
            "fitted_rate": series.fitted_rate if series else float("nan"),
            "last_error": series.errors[-1] if series else float("nan"),
            "energy_drift": diag.energy_drift,
        })

    results_path = out_dir / "results.csv"
    write_results(rows, results_path)
    elapsed = time.time() - start
    stats.add_metric("system", sys.name)
    stats.add_metric("points", len(points))
    stats.add_metric("work_items", len(work))
    stats.add_metric("failed_points", len(failures))
    stats.add_metric("elapsed_seconds", elapsed)
    stats.write(out_dir / "reports")
    logger.info(f"Done. {sys.name}: {len(points)} points, exit {exit_code}, elapsed {elapsed:.1f}s")
    return RunOutcome(exit_code, records, results_path)


def verdicts_from_csv(path: Path, tolerances: Optional[Tolerances] = None) -> Dict[str, Verdict]:
    """Recompute each point's verdict from results.csv alone; an empty T_f marks a critical point.

    The acceptance and tail tolerances come from the file's own columns unless ``tolerances``
    overrides them.
    """
    df = read_results(Path(path))
    out: Dict[str, Verdict] = {}
    for pid, group in df.groupby("point_id", sort=True):
        group = group.sort_values("r")
        reference = float(group["T_f"].iloc[0])
        if not math.isfinite(reference):
            out[pid] = "CRITICAL"
            continue
        radii = group["r"].tolist()
        values = group["value"].tolist()
        limit = extrapolate_power_tail(radii, values).limit
        if tolerances is None:
            acceptance, tail = float(group["acceptance"].iloc[0]), float(group["tail"].iloc[0])
        else:
            acceptance, tail = tolerances.acceptance, tolerances.tail
        out[pid] = judge(limit, reference, group["abs_error"].tolist(), acceptance, tail)
    return out

