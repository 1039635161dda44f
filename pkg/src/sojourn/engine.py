"""Sojourn-time differences along orbits and their r -> infinity limit.

For a non-critical point m the engine integrates

    1/2 int_0^t* [f(Phi(flow(-t, m))/r) - f(Phi(flow(t, m))/r)] dt

with Phi always evaluated on the actual orbit, and compares the extrapolated
limit with T_f(m).
"""
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.optimize import brentq

from .dynamics.brackets import nabla_H
from .dynamics.checks import T_f_observable
from .dynamics.system import HamiltonianSystem
from .errors import DomainError, UnsupportedFunctionError
from .locfn.functions import LocalisationFunction
from .locfn.pairs import half_difference_integral, half_difference_sum
from .models import RadiiSchedule, SojournSeries, Tolerances, Verdict
from .numerics.extrapolate import errors_decreasing, extrapolate_power_tail, fitted_rate
from .numerics.integrators import Orbit
from .numerics.quadrature import geometric_breakpoints

EXIT_MARGIN = 1.01


@dataclass(frozen=True)
class SojournOptions:
    """Knobs of one sojourn evaluation.

    ``diagnose`` evaluates critical points instead of rejecting them; the
    two orbit branches then coincide and the difference vanishes.
    """
    quadrature_tol: float = 1e-10
    tail_tol: float = 1e-4
    critical_eps: float = 1e-8
    diagnose: bool = False

    @classmethod
    def from_tolerances(cls, tol: Tolerances, diagnose: bool = False) -> "SojournOptions":
        return cls(tol.quadrature, tol.tail, tol.critical_eps, diagnose)


def _paths(sys: HamiltonianSystem, orbit: Orbit):
    """t -> (Phi(flow(-t)), Phi(flow(t))) from a single orbit query."""
    def paths(t):
        states = orbit(np.concatenate([-t, t]))
        values = np.asarray(sys.phi(states), dtype=float).reshape(2 * t.size, sys.d)
        return values[: t.size], values[t.size:]

    return paths


def _start(sys: HamiltonianSystem, m, opts: SojournOptions):
    z = sys.require(m)
    grad = nabla_H(sys, z)
    phi0 = np.asarray(sys.phi(z), dtype=float).reshape(sys.d)
    critical = bool(np.linalg.norm(grad) < opts.critical_eps)
    if critical and not opts.diagnose:
        raise DomainError(f"{sys.name}: m = {z.tolist()} lies in Crit(H, Phi) "
                          f"(|grad H| < {opts.critical_eps:g})")
    return z, grad, phi0, critical


def _refine_exits(sys: HamiltonianSystem, orbit: Orbit, kinks: List[float], r: float) -> List[float]:
    """Locate where |Phi| actually crosses r on each branch near the predicted crossings."""
    refined = set(kinks)
    for t0 in kinks:
        w = 1e-3 * (1.0 + t0)
        lo, hi = max(t0 - w, 0.0), min(t0 + w, orbit.t_max)
        for sign in (-1.0, 1.0):
            def excess(t, sign=sign):
                state = orbit(np.array([sign * t]))
                return float(np.linalg.norm(sys.phi(state[0]))) - r

            a, b = excess(lo), excess(hi)
            if a * b < 0:
                refined.add(brentq(excess, lo, hi, xtol=1e-14 * max(1.0, t0)))
    return sorted(refined)


def sojourn_difference(sys: HamiltonianSystem, f: LocalisationFunction, m, r: float,
                       opts: SojournOptions = SojournOptions()) -> Tuple[float, float]:
    """Continuous-time sojourn difference at scale r; returns ``(value, t_star)``."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if f.dimension != sys.d:
        raise DomainError(f"f acts on R^{f.dimension} but Phi has {sys.d} components")
    z, grad, phi0, critical = _start(sys, m, opts)

    if critical:
        t_star = max(1.0, float(r))
        orbit = sys.orbit(z, t_star)
        value = half_difference_integral(f, _paths(sys, orbit), r, geometric_breakpoints([], t_star),
                                         opts.quadrature_tol)
        logger.debug(f"{sys.name}: critical point, diagnostic sojourn {value:.3e} at r={r:g}")
        return value, t_star

    t_star = f.truncation_time(phi0, grad, r, opts.tail_tol)
    if not f.is_smooth:
        t_star *= EXIT_MARGIN
    kinks = f.kink_times(phi0, grad, r)
    orbit = sys.orbit(z, t_star)
    if not f.is_smooth and sys.refine_crossings:
        kinks = _refine_exits(sys, orbit, kinks, r)
    value = half_difference_integral(f, _paths(sys, orbit), r, geometric_breakpoints(kinks, t_star),
                                     opts.quadrature_tol)
    logger.debug(f"{sys.name}: r={r:g} t*={t_star:.4g} value={value:.12g}")
    return value, t_star


def discrete_horizon(sys: HamiltonianSystem, f: LocalisationFunction, m, r: float,
                     opts: SojournOptions = SojournOptions()) -> int:
    """N* = ceil(t*): number of integer times the discrete sum needs."""
    _, grad, phi0, critical = _start(sys, m, opts)
    if critical:
        return max(1, int(math.ceil(r)))
    return int(math.ceil(f.truncation_time(phi0, grad, r, opts.tail_tol)))


def sojourn_difference_discrete(sys: HamiltonianSystem, f: LocalisationFunction, m, r: float,
                                opts: SojournOptions = SojournOptions()) -> float:
    """1/2 sum_{n=1}^{N*} [f(Phi(flow(-n, m))/r) - f(Phi(flow(n, m))/r)]."""
    if not f.has_second_derivatives:
        raise UnsupportedFunctionError("the discrete-time sojourn needs a C^2 localisation function")
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    if f.dimension != sys.d:
        raise DomainError(f"f acts on R^{f.dimension} but Phi has {sys.d} components")
    z = sys.require(m)
    n_max = discrete_horizon(sys, f, z, r, opts)
    orbit = sys.orbit(z, float(n_max))
    return half_difference_sum(f, _paths(sys, orbit), r, n_max)


def judge(limit: float, reference: float, errors: Sequence[float], tolerance: float,
          floor: float) -> Verdict:
    """PASS iff |limit - T| <= tolerance * max(1, |T|) and the last errors decrease."""
    scale = max(1.0, abs(reference))
    if not math.isfinite(limit) or abs(limit - reference) > tolerance * scale:
        return "FAIL"
    return "PASS" if errors_decreasing(errors, floor * scale) else "FAIL"


def radii_values(schedule: Union[RadiiSchedule, Sequence[float]]) -> List[float]:
    radii = schedule.values() if isinstance(schedule, RadiiSchedule) else [float(r) for r in schedule]
    if len(radii) < 4:
        raise DomainError("converge needs at least 4 radii")
    if any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
        raise DomainError("radii must be positive and strictly increasing")
    return radii


def summarise(name: str, radii: Sequence[float], values: Sequence[float], times: Sequence[float],
              reference: float, tolerances: Tolerances, discrete: bool = False) -> SojournSeries:
    """Errors, extrapolated limit and verdict for sojourn values already computed on ``radii``."""
    errors = [abs(v - reference) for v in values]
    ex = extrapolate_power_tail(radii, values)
    verdict = judge(ex.limit, reference, errors, tolerances.acceptance, tolerances.tail)
    logger.info(f"{name}: T_f={reference:.10g} limit={ex.limit:.10g} ({ex.method}) -> {verdict}")
    return SojournSeries(
        radii=list(radii),
        values=list(values),
        reference=reference,
        errors=errors,
        fitted_rate=fitted_rate(radii, errors),
        truncation_times=list(times),
        limit=ex.limit,
        limit_method=ex.method,
        mode="discrete" if discrete else "continuous",
        verdict=verdict,
        tolerance=tolerances.acceptance,
    )


def sojourn_at(sys: HamiltonianSystem, f: LocalisationFunction, z, r: float, opts: SojournOptions,
               discrete: bool = False) -> Tuple[float, float]:
    """One (point, r) work item: ``(value, t_star)``, with N* as t_star in discrete mode."""
    if discrete:
        return sojourn_difference_discrete(sys, f, z, r, opts), float(discrete_horizon(sys, f, z, r, opts))
    return sojourn_difference(sys, f, z, r, opts)


def converge(sys: HamiltonianSystem, f: LocalisationFunction, m,
             radii_schedule: Union[RadiiSchedule, Sequence[float]], *,
             tolerances: Tolerances = Tolerances(), discrete: bool = False) -> SojournSeries:
    radii = radii_values(radii_schedule)
    opts = SojournOptions.from_tolerances(tolerances)
    z = sys.require(m)
    reference = T_f_observable(sys, f, z, eps=opts.critical_eps, tol=opts.quadrature_tol)
    values, times = [], []
    for r in radii:
        value, t_star = sojourn_at(sys, f, z, r, opts, discrete)
        values.append(value)
        times.append(t_star)
    return summarise(sys.name, radii, values, times, reference, tolerances, discrete)
