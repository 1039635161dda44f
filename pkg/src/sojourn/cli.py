import json
from pathlib import Path
from typing import List, Optional

import pandas as pd
import typer

from .acceptance import run_acceptance, verify_rf_suites
from .catalog.registry import listing
from .config import Settings, apply_overrides, load_config
from .errors import ConfigError, DomainError, FlowError, NumericError, WindowTooSmallError
from .exporters.stats import FLOAT_FORMAT
from .logging import setup_logging
from .models import RadiiSchedule, RunConfig
from .quantum import verify_quantum
from .runner import EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, run_sojourn

app = typer.Typer(help="Sojourn-time differences of Hamiltonian orbits against the time observable T_f")


def _fail(code: int, message: str):
    typer.echo(f"error: {message}", err=True)
    raise typer.Exit(code)


def _config(path: Optional[str]) -> RunConfig:
    try:
        return load_config(path) if path else RunConfig()
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))


@app.command("verify-rf")
def verify_rf(config: Optional[str] = typer.Option(None, "--config", "-c", help="Run config (JSON)"),
              out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
              seed: Optional[int] = typer.Option(None, "--seed")):
    """Check the localisation function: homogeneity, closed form, pair limits."""
    settings = Settings()
    logger = setup_logging(settings.log_level)
    cfg = _config(config)
    try:
        cfg = apply_overrides(cfg, out=out, seed=seed)
        suites = verify_rf_suites(cfg.localisation, seed=cfg.seed)
    except (ConfigError, DomainError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except NumericError as exc:
        _fail(EXIT_NUMERIC, f"{exc} {exc.diagnostics}")
    report = Path(cfg.output_dir) / "verify_rf.csv"
    report.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([s.model_dump() for s in suites]).to_csv(report, index=False, float_format=FLOAT_FORMAT)
    for s in suites:
        typer.echo(f"{s.status:8s} {s.name}")
    logger.info(f"report written to {report}")
    raise typer.Exit(EXIT_FAIL if any(s.status == "FAIL" for s in suites) else EXIT_OK)


@app.command()
def sojourn(config: str = typer.Option(..., "--config", "-c", help="Run config (JSON)"),
            out: Optional[str] = typer.Option(None, "--out", help="Output directory"),
            seed: Optional[int] = typer.Option(None, "--seed", help="Seed for random_points"),
            radii: Optional[str] = typer.Option(None, "--radii", help="Radii schedule 'r0,xK,count'"),
            tol: Optional[float] = typer.Option(None, "--tol", help="Acceptance tolerance"),
            discrete: Optional[bool] = typer.Option(None, "--discrete/--continuous", help="Discrete-time sums"),
            dry_run: bool = typer.Option(False, "--dry-run", help="List work items without computing")):
    """Sojourn-time series for every configured point; writes results.csv and reports."""
    settings = Settings()
    cfg = _config(config)
    try:
        cfg = apply_overrides(cfg, out=out, seed=seed, radii=radii, tol=tol, discrete=discrete)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    setup_logging(settings.log_level, None if dry_run else Path(cfg.output_dir) / "run.log")
    try:
        outcome = run_sojourn(cfg, settings, dry_run=dry_run)
    except (ConfigError, DomainError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except FlowError as exc:
        _fail(EXIT_NUMERIC, f"{exc} (reached t={exc.reached_time:.6g})")
    except NumericError as exc:
        _fail(EXIT_NUMERIC, f"{exc} {exc.diagnostics}")
    if dry_run:
        for item in outcome.plan:
            typer.echo(f"{item['point_id']}\t{item['r']:g}\t{item['t_star']:.6g}")
    raise typer.Exit(outcome.exit_code)


@app.command()
def quantum(dim: int = typer.Option(512, "--dim", help="Truncation dimension D"),
            margin: int = typer.Option(32, "--margin", help="Edge band b"),
            width: Optional[float] = typer.Option(None, "--width", help="Packet width (default D/16)"),
            kappa: float = typer.Option(1.5707963267948966, "--kappa", help="Packet momentum"),
            offset: Optional[float] = typer.Option(
                None, "--offset", help="Number-operator offset c (default D/2-4; 0 gives N = diag(0..D-1))"),
            radii: Optional[str] = typer.Option(None, "--radii", help="Radii schedule 'r0,xK,count'"),
            out: str = typer.Option("out/quantum", "--out", help="Output directory")):
    """Truncated shift system: commutation identity, <A> slope and the sojourn limit."""
    settings = Settings()
    logger = setup_logging(settings.log_level)
    try:
        values = RadiiSchedule.parse(radii).values() if radii else None
        report = verify_quantum(dim, margin, width=width, kappa=kappa, offset=offset, radii=values)
    except (ValueError, DomainError) as exc:
        _fail(EXIT_CONFIG, str(exc))
    except WindowTooSmallError as exc:
        _fail(EXIT_FAIL, f"{exc}")
    except NumericError as exc:
        _fail(EXIT_NUMERIC, f"{exc} {exc.diagnostics}")
    path = Path(out) / "quantum_report.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    verdict = report.series.verdict if report.series else "CRITICAL"
    typer.echo(f"{verdict} <A>/<1-Delta^2> = {report.reference:.10g} "
               f"limit = {report.series.limit if report.series else float('nan'):.10g}")
    logger.info(f"report written to {path}")
    raise typer.Exit(EXIT_OK if verdict == "PASS" else EXIT_FAIL)


@app.command("catalog-list")
def catalog_list(as_json: bool = typer.Option(False, "--json", help="Emit entries with JSON schemas")):
    """List the example systems with their flows and default parameters."""
    entries = listing()
    if as_json:
        typer.echo(json.dumps(entries, indent=2, sort_keys=True))
        return
    for e in entries:
        typer.echo(f"{e['name']:22s} {e['flow']:36s} {e['chart']:10s} {e['anchor']}")


@app.command()
def accept(only: Optional[List[int]] = typer.Option(None, "--only", help="Run only these criteria"),
           seed: int = typer.Option(0, "--seed"),
           out: Optional[str] = typer.Option(None, "--out", help="Write acceptance.csv here")):
    """Run the acceptance criteria and print one verdict line per criterion."""
    settings = Settings()
    setup_logging(settings.log_level)
    results = run_acceptance(only, seed)
    for res in results:
        typer.echo(f"{res.number:2d} {'PASS' if res.passed else 'FAIL'} {res.title} "
                   f"({res.seconds:.1f}s) {res.detail}")
    total = sum(r.seconds for r in results)
    typer.echo(f"total runtime {total:.1f}s")
    if out:
        path = Path(out) / "acceptance.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame([r.model_dump() for r in results]).to_csv(path, index=False)
    raise typer.Exit(EXIT_OK if all(r.passed for r in results) else EXIT_FAIL)
