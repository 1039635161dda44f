"""Orbit construction: exact flows, composed Stormer-Verlet, and DOP853.

An orbit is a callable ``t -> states`` on ``[-t_max, t_max]`` (vectorised over
``t``) that also records the energy drift observed while building it.
Numeric orbits are rebuilt with a refined step or tolerance until the drift
budget holds; the refinement loop is a tenacity ``Retrying``.
"""
import math
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np
from loguru import logger
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..errors import FlowError

if TYPE_CHECKING:
    from ..dynamics.system import HamiltonianSystem


class DriftBudgetExceeded(Exception):
    def __init__(self, drift: float, reached_time: float):
        super().__init__(f"energy drift {drift:.3e} (reached t={reached_time:.6g})")
        self.drift = drift
        self.reached_time = reached_time


class Orbit:
    t_max: float = math.inf
    energy_drift: float = 0.0
    method: str = "exact"

    def __call__(self, t) -> np.ndarray:
        raise NotImplementedError

    def _check_window(self, t: np.ndarray) -> None:
        if t.size and np.max(np.abs(t)) > self.t_max * (1 + 1e-12):
            raise FlowError(
                f"orbit requested at |t|={np.max(np.abs(t)):.6g} beyond its window {self.t_max:.6g}",
                reached_time=self.t_max,
            )


class ExactOrbit(Orbit):
    """Closed-form flow; repeated queries on the same time grid are memoised."""

    def __init__(self, flow: Callable[[np.ndarray, np.ndarray], np.ndarray], z0: np.ndarray,
                 t_max: float = math.inf):
        self._flow = flow
        self.z0 = np.asarray(z0, dtype=float)
        self.t_max = t_max
        self._memo = {}

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_window(t)
        key = t.tobytes()
        if key not in self._memo:
            if len(self._memo) > 64:
                self._memo.clear()
            self._memo[key] = self._flow(t, self.z0)
        return self._memo[key]


class DenseOrbit(Orbit):
    def __init__(self, evaluate: Callable[[np.ndarray], np.ndarray], t_max: float,
                 energy_drift: float, method: str, detail: Optional[dict] = None):
        self._evaluate = evaluate
        self.t_max = t_max
        self.energy_drift = energy_drift
        self.method = method
        self.detail = detail or {}

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        self._check_window(t)
        return self._evaluate(t)


def yoshida4_coefficients():
    """Drift (c) and kick (d) weights of the 4th-order Yoshida composition."""
    cbrt2 = 2.0 ** (1.0 / 3.0)
    w1 = 1.0 / (2.0 - cbrt2)
    w0 = -cbrt2 * w1
    c = (0.5 * w1, 0.5 * (w0 + w1), 0.5 * (w0 + w1), 0.5 * w1)
    d = (w1, w0, w1)
    return c, d


def composed_verlet(grad_kinetic, grad_potential, q0, p0, dt: float, steps: int):
    """Integrate q' = grad_kinetic(p), p' = -grad_potential(q) with fixed step ``dt``.

    Returns arrays of positions and momenta of shape ``(steps + 1, n)``.
    """
    c, d = yoshida4_coefficients()
    q = np.array(q0, dtype=float)
    p = np.array(p0, dtype=float)
    qs = np.empty((steps + 1, q.size))
    ps = np.empty((steps + 1, p.size))
    qs[0], ps[0] = q, p
    for i in range(1, steps + 1):
        for j in range(3):
            q = q + c[j] * dt * grad_kinetic(p)
            p = p - d[j] * dt * grad_potential(q)
        q = q + c[3] * dt * grad_kinetic(p)
        qs[i], ps[i] = q, p
    return qs, ps


def _drift(system: "HamiltonianSystem", states: np.ndarray, times: np.ndarray, z0: np.ndarray, budget: float):
    """Max deviation of H and of the system's extra first integrals from their values at z0."""
    energies = system.hamiltonian(states)
    bad = ~np.isfinite(energies) | ~np.all(np.isfinite(states), axis=-1)
    if bad.any():
        first = int(np.argmax(bad))
        raise DriftBudgetExceeded(math.inf, float(abs(times[max(first - 1, 0)])))
    dev = np.abs(energies - float(system.hamiltonian(z0)))
    extra = system.first_integrals(states)
    if extra is not None:
        base = system.first_integrals(z0[None, :])[0]
        dev = np.maximum(dev, np.max(np.abs(extra - base).reshape(len(states), -1), axis=-1))
    drift = float(dev.max()) if dev.size else 0.0
    if drift > budget:
        raise DriftBudgetExceeded(drift, float(abs(times[int(np.argmax(dev > budget))])))
    return drift


def _splitting_once(system, z0, t_max, dt, budget):
    n = system.n
    steps = max(1, math.ceil(t_max / dt))
    h = t_max / steps
    q0, p0 = z0[:n], z0[n:]
    fq, fp = composed_verlet(system.kinetic_gradient, system.potential_gradient, q0, p0, h, steps)
    bq, bp = composed_verlet(system.kinetic_gradient, system.potential_gradient, q0, p0, -h, steps)
    times = np.concatenate([-h * np.arange(steps, 0, -1), h * np.arange(steps + 1)])
    states = np.concatenate([np.hstack([bq, bp])[:0:-1], np.hstack([fq, fp])])
    drift = _drift(system, states, times, z0, budget)
    spline = CubicHermiteSpline(times, states, system.vector_field(states), axis=0)
    return DenseOrbit(spline, t_max, drift, "splitting", {"dt": h, "steps": steps})


def _adaptive_once(system, z0, t_max, rtol, budget):
    def rhs(_t, y):
        return system.vector_field(y)

    pieces, drifts = [], []
    for sign in (1.0, -1.0):
        sol = solve_ivp(rhs, (0.0, sign * t_max), z0, method="DOP853",
                        rtol=rtol, atol=rtol, dense_output=True)
        if sol.status != 0:
            raise DriftBudgetExceeded(math.inf, float(abs(sol.t[-1])))
        drifts.append(_drift(system, sol.y.T, sol.t, z0, budget))
        pieces.append(sol)
    fwd, bwd = pieces
    drift = max(drifts)

    def evaluate(t):
        out = np.empty((t.size, z0.size))
        pos = t >= 0
        if pos.any():
            out[pos] = fwd.sol(t[pos]).T
        if (~pos).any():
            out[~pos] = bwd.sol(t[~pos]).T
        return out

    return DenseOrbit(evaluate, t_max, drift, "dop853",
                      {"rtol": rtol, "nfev": int(fwd.nfev + bwd.nfev)})


def _refine(build, label: str, attempts: int):
    try:
        for attempt in Retrying(stop=stop_after_attempt(attempts),
                                retry=retry_if_exception_type(DriftBudgetExceeded),
                                reraise=True):
            with attempt:
                k = attempt.retry_state.attempt_number
                if k > 1:
                    logger.debug(f"{label}: refinement {k - 1}")
                return build(k - 1)
    except DriftBudgetExceeded as exc:
        raise FlowError(f"{label}: drift budget not met after {attempts} refinements ({exc})",
                        reached_time=exc.reached_time, diagnostics={"drift": exc.drift}) from exc


def splitting_orbit(system: "HamiltonianSystem", z0, t_max: float, *, drift_budget: float,
                    dt: float = 0.01, attempts: int = 7) -> DenseOrbit:
    z0 = np.asarray(z0, dtype=float)
    budget = drift_budget * max(1.0, t_max)
    return _refine(lambda k: _splitting_once(system, z0, t_max, dt / 2 ** k, budget),
                   f"{system.name} splitting orbit", attempts)


def adaptive_orbit(system: "HamiltonianSystem", z0, t_max: float, *, drift_budget: float,
                   rtol: float = 1e-12, attempts: int = 3) -> DenseOrbit:
    z0 = np.asarray(z0, dtype=float)
    budget = drift_budget * max(1.0, t_max)
    return _refine(lambda k: _adaptive_once(system, z0, t_max, max(rtol / 10 ** k, 3e-14), budget),
                   f"{system.name} DOP853 orbit", attempts)
