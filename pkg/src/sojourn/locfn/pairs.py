"""Flow-free pair limits

    lim_r  1/2 int_0^inf dt [f((x - t y)/r) - f((x + t y)/r)]   = -x.grad R_f(y)
    lim_r  1/2 sum_n>=1    [f((x - n y)/r) - f((x + n y)/r)]    = -x.grad R_f(y)

used as oracles for the sojourn engine.
"""
import math
from typing import Callable, Sequence, Tuple

import numpy as np

from ..errors import DomainError, UnsupportedFunctionError
from ..models import LimitEstimate
from ..numerics.extrapolate import extrapolate_power_tail
from ..numerics.quadrature import geometric_breakpoints, integrate
from .functions import LocalisationFunction

PhiPaths = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

_CHUNK = 1 << 16


def _vectors(f: LocalisationFunction, x, y) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (f.dimension,) or y.shape != (f.dimension,):
        raise DomainError(f"x and y must lie in R^{f.dimension}")
    if not np.any(y):
        raise DomainError("pair limits need y != 0")
    return x, y


def _linear_paths(x: np.ndarray, y: np.ndarray) -> PhiPaths:
    return lambda t: (x - t[:, None] * y, x + t[:, None] * y)


def half_difference_integral(f: LocalisationFunction, paths: PhiPaths, r: float,
                             breakpoints, tol: float) -> float:
    """1/2 int [f(past(t)/r) - f(future(t)/r)] dt over the given panels.

    ``paths`` maps an array of times t >= 0 to the values of Phi at -t and at
    +t along the orbit, two arrays of shape ``(len(t), d)``.
    """
    def integrand(t):
        past, future = paths(t)
        return 0.5 * (f(past / r) - f(future / r))

    return float(integrate(integrand, breakpoints, tol=tol).value)


def half_difference_sum(f: LocalisationFunction, paths: PhiPaths, r: float, n_max: int) -> float:
    """1/2 sum_{n=1}^{n_max} [f(past(n)/r) - f(future(n)/r)], summed in chunks."""
    total = 0.0
    for start in range(1, n_max + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, n_max + 1), dtype=float)
        past, future = paths(n)
        total += float(np.sum(f(past / r) - f(future / r)))
    return 0.5 * total


def pair_inner_continuous(f: LocalisationFunction, x, y, r: float, *, tol: float = 1e-10,
                          tail_tol: float = 1e-7) -> Tuple[float, float]:
    x, y = _vectors(f, x, y)
    t_star = f.truncation_time(x, y, r, tail_tol)
    if not np.any(x):
        return 0.0, t_star
    bps = geometric_breakpoints(f.kink_times(x, y, r), t_star)
    value = half_difference_integral(f, _linear_paths(x, y), r, bps, tol)
    return value, t_star


def pair_inner_discrete(f: LocalisationFunction, x, y, r: float, *,
                        tail_tol: float = 1e-7) -> Tuple[float, float]:
    if not f.has_second_derivatives:
        raise UnsupportedFunctionError("discrete pair limits need a C^2 localisation function")
    x, y = _vectors(f, x, y)
    t_star = f.truncation_time(x, y, r, tail_tol)
    if not np.any(x):
        return 0.0, t_star
    n_max = int(math.ceil(t_star))
    value = half_difference_sum(f, _linear_paths(x, y), r, n_max)
    return value, float(n_max)


def _estimate(radii: Sequence[float], inner) -> LimitEstimate:
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly increasing")
    values, times = [], []
    for r in radii:
        v, t = inner(r)
        values.append(v)
        times.append(t)
    ex = extrapolate_power_tail(radii, values)
    return LimitEstimate(radii=radii, values=values, truncation_times=times,
                         limit=ex.limit, rate=ex.rate, method=ex.method)


def pair_limit_continuous(f: LocalisationFunction, x, y, radii: Sequence[float], *,
                          tol: float = 1e-10, tail_tol: float = 1e-7) -> LimitEstimate:
    _vectors(f, x, y)
    return _estimate(radii, lambda r: pair_inner_continuous(f, x, y, r, tol=tol, tail_tol=tail_tol))


def pair_limit_discrete(f: LocalisationFunction, x, y, radii: Sequence[float], *,
                        tail_tol: float = 1e-7) -> LimitEstimate:
    if not f.has_second_derivatives:
        raise UnsupportedFunctionError("discrete pair limits need a C^2 localisation function")
    _vectors(f, x, y)
    return _estimate(radii, lambda r: pair_inner_discrete(f, x, y, r, tail_tol=tail_tol))
