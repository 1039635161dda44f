"""Checks on a system: the commutation assumption, T_f, the time-operator law."""
from typing import Iterable, Sequence

import numpy as np
from loguru import logger

from ..errors import DomainError
from ..locfn.functions import LocalisationFunction
from ..locfn.rfunc import grad_Rf
from ..models import AssumptionReport, TimeOperatorReport
from .brackets import fd_gradient, nabla_H, poisson_bracket
from .system import HamiltonianSystem


def _grid(t_grid) -> np.ndarray:
    t = np.sort(np.asarray(list(t_grid), dtype=float))
    if t.size < 3 or not np.allclose(t, -t[::-1], atol=1e-12):
        raise DomainError("t_grid must be symmetric about 0 with at least 3 points")
    return t


def check_assumption(sys: HamiltonianSystem, m, t_grid: Sequence[float], eps: float = 1e-8) -> AssumptionReport:
    """Test {{Phi_j, H}, H} = 0 through the linearity of Phi along the orbit of m."""
    z = sys.require(m)
    t = _grid(t_grid)
    orbit = sys.orbit(z, float(np.max(np.abs(t))))
    states = orbit(t)
    phis = np.asarray(sys.phi(states), dtype=float).reshape(t.size, sys.d)
    second = np.abs(phis[2:] - 2.0 * phis[1:-1] + phis[:-2])
    grad0 = nabla_H(sys, z)
    phi0 = np.asarray(sys.phi(z), dtype=float).reshape(sys.d)
    linear = np.abs(phis - phi0 - t[:, None] * grad0)
    variation = max(float(np.max(np.abs(nabla_H(sys, s) - grad0))) for s in states)
    drift = float(np.max(np.abs(sys.hamiltonian(states) - sys.hamiltonian(z))))
    return AssumptionReport(
        max_second_difference=float(second.max()),
        max_linearity_residual=float(linear.max()),
        max_nabla_variation=variation,
        energy_drift=drift,
        critical=bool(np.linalg.norm(grad0) < eps),
    )


def T_f_observable(sys: HamiltonianSystem, f: LocalisationFunction, m, eps: float = 1e-8,
                   tol: float = 1e-10) -> float:
    """T_f(m) = -Phi(m) . (grad R_f)(grad H(m))."""
    z = sys.require(m)
    if f.dimension != sys.d:
        raise DomainError(f"f acts on R^{f.dimension} but Phi has {sys.d} components")
    grad = nabla_H(sys, z)
    if np.linalg.norm(grad) < eps:
        raise DomainError(f"{sys.name}: m = {z.tolist()} lies in Crit(H, Phi) (|grad H| < {eps:g})")
    phi = np.asarray(sys.phi(z), dtype=float).reshape(sys.d)
    return float(-phi @ grad_Rf(f, grad, tol=tol))


def check_time_operator(sys: HamiltonianSystem, f: LocalisationFunction, m, t_set: Iterable[float],
                        eps: float = 1e-8) -> TimeOperatorReport:
    """max over t of |T_f(flow(t, m)) - T_f(m) - t|."""
    z = sys.require(m)
    times = [float(t) for t in t_set]
    try:
        base = T_f_observable(sys, f, z, eps)
    except DomainError as exc:
        return TimeOperatorReport(max_residual=float("nan"), skipped=True, reason=str(exc))
    orbit = sys.orbit(z, max(abs(t) for t in times))
    states = orbit(np.asarray(times))
    residuals = {}
    for t, s in zip(times, states):
        try:
            residuals[f"{t:g}"] = abs(T_f_observable(sys, f, s, eps) - base - t)
        except DomainError as exc:
            logger.warning(f"{sys.name}: orbit of {z.tolist()} approaches the critical set at t={t:g}")
            return TimeOperatorReport(max_residual=float("nan"), residuals=residuals,
                                      skipped=True, reason=str(exc))
    return TimeOperatorReport(max_residual=max(residuals.values()), residuals=residuals)


def check_flow_group(sys: HamiltonianSystem, m, s: float, t: float) -> float:
    """|flow(t, flow(s, m)) - flow(t + s, m)|_inf."""
    z = sys.require(m)
    return float(np.max(np.abs(sys.flow(t, sys.flow(s, z)) - sys.flow(t + s, z))))


def energy_drift(sys: HamiltonianSystem, m, t_max: float, samples: int = 201) -> float:
    z = sys.require(m)
    t = np.linspace(-t_max, t_max, samples)
    states = sys.orbit(z, t_max)(t)
    return float(np.max(np.abs(sys.hamiltonian(states) - sys.hamiltonian(z))))


def crosscheck_nabla(sys: HamiltonianSystem, m) -> float:
    """Relative gap between the closed-form grad H and the finite-difference bracket."""
    z = sys.require(m)
    closed = nabla_H(sys, z, method="auto")
    fd = nabla_H(sys, z, method="bracket")
    return float(np.max(np.abs(closed - fd)) / max(1.0, float(np.max(np.abs(closed)))))


def critical_inclusion(sys: HamiltonianSystem, m):
    """(|X_H(m)|, |grad H(m)|): X_H = 0 forces grad H = 0."""
    z = sys.require(m)
    gh = fd_gradient(sys, sys.hamiltonian, z)
    return float(np.linalg.norm(gh)), float(np.linalg.norm(nabla_H(sys, z)))


def orthogonality_defect(sys: HamiltonianSystem, m) -> float:
    """{|Phi|^2, H}(m), which equals 2 Phi . grad H; T = 0 for radial f iff it vanishes."""
    z = sys.require(m)
    return poisson_bracket(sys, lambda w: float(np.sum(np.asarray(sys.phi(w)) ** 2)), sys.H, z)


def check_gradient_law(sys: HamiltonianSystem, m) -> float:
    """|grad H(m) - g(H(m))| for systems with grad H = g(H); nan otherwise."""
    z = sys.require(m)
    g = sys.gradient_law(float(sys.hamiltonian(z)))
    if g is None:
        return float("nan")
    return float(np.max(np.abs(nabla_H(sys, z, method="bracket") - g)))
