"""Adaptive quadrature on scipy's ``quad_vec`` with explicit breakpoints.

Every result either meets ``max(tol, rel_tol*|I|)`` or raises ``NumericError``;
callers never receive a value whose error estimate exceeds the target.
"""
from dataclasses import dataclass
from typing import Callable, Iterable, Union

import numpy as np
from loguru import logger
from scipy.integrate import quad_vec

from ..errors import NumericError

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    value: Union[float, np.ndarray]
    error: float
    intervals: int


def integrate(func: Integrand, breakpoints: Iterable[float], *, tol: float = 1e-10,
              rel_tol: float = 1e-13, max_intervals: int = 50_000) -> QuadratureResult:
    """Integrate ``func`` over ``[min(breakpoints), max(breakpoints)]``.

    The inner breakpoints seed the initial panels. ``func`` maps a 1-D array
    of abscissae to an array whose first axis matches; vector-valued
    integrands are measured in the max norm.
    """
    edges = np.unique(np.asarray(list(breakpoints), dtype=float))
    if edges.size < 2:
        return QuadratureResult(0.0, 0.0, 0)

    def point(t):
        return np.asarray(func(np.array([t])), dtype=float)[0]

    total, err, info = quad_vec(point, edges[0], edges[-1], epsabs=tol, epsrel=rel_tol, norm="max",
                                limit=max_intervals, points=edges[1:-1], full_output=True)
    intervals = int(len(info.intervals))
    target = max(tol, rel_tol * float(np.max(np.abs(total))))
    if info.status == 1:
        raise NumericError(
            "adaptive quadrature exceeded its interval budget",
            {"intervals": intervals, "error": float(err), "target": target},
        )
    if info.status != 0 or not np.isfinite(err):
        raise NumericError(
            f"adaptive quadrature did not reach tolerance: {info.message}",
            {"intervals": intervals, "error": float(err), "target": target},
        )
    logger.debug(f"quadrature: {intervals} intervals, {info.neval} evaluations, error {float(err):.2e}")
    value = float(total) if np.ndim(total) == 0 else np.asarray(total, dtype=float)
    return QuadratureResult(value, float(err), intervals)


def geometric_breakpoints(kinks: Iterable[float], upper: float, start: float = 0.0) -> np.ndarray:
    """Breakpoints ``start, kinks..., k*2, k*4, ..., upper`` for decaying tails.

    Panels double in length past the last kink so that a tail spanning many
    decades costs a logarithmic number of panels.
    """
    pts = sorted(k for k in kinks if start < k < upper)
    out = [start] + pts
    last = pts[-1] if pts else max(start, upper * 1e-3, 1e-12)
    if not pts and last > start:
        out.append(last)
    x = last * 2.0
    while x < upper:
        out.append(x)
        x *= 2.0
    out.append(upper)
    return np.unique(np.asarray(out, dtype=float))


def improper_integral(func: Integrand, start: float, tail_bound: Callable[[float], float], *,
                      kinks: Iterable[float] = (), tol: float = 1e-10, max_doublings: int = 200) -> QuadratureResult:
    """Integrate ``func`` on ``[start, inf)``.

    The upper limit ``M`` doubles until ``tail_bound(M)`` (an analytic bound of
    the integral over ``[M, inf)``) drops below ``tol / 10``; the reported error
    includes that bound.
    """
    kinks = list(kinks)
    upper = max([start * 2.0, 1.0] + [2.0 * k for k in kinks])
    for _ in range(max_doublings):
        bound = tail_bound(upper)
        if bound < 0.1 * tol:
            break
        upper *= 2.0
    else:
        raise NumericError("tail bound never fell below tolerance",
                           {"upper": upper, "tail_bound": tail_bound(upper), "tol": tol})
    res = integrate(func, geometric_breakpoints(kinks, upper, start), tol=0.9 * tol)
    return QuadratureResult(res.value, res.error + bound, res.intervals)
