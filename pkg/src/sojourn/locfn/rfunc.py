"""The averaged localisation function

    R_f(x) = int_0^inf dmu/mu [f(mu x) - chi_[0,1](mu)]

and its gradient, which enters the time observable T_f.
"""
import math
from typing import Iterable, Literal

import numpy as np
from loguru import logger

from ..errors import DomainError, NumericError, UnsupportedFunctionError
from ..models import HomogeneityReport, SampleDeviation
from ..numerics.quadrature import improper_integral, integrate
from .functions import LocalisationFunction


def _nonzero(f: LocalisationFunction, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (f.dimension,):
        raise DomainError(f"expected a point of R^{f.dimension}, got shape {x.shape}")
    if not np.any(x):
        raise DomainError("R_f is undefined at x = 0")
    return x


def eval_Rf(f: LocalisationFunction, x, tol: float = 1e-10) -> float:
    x = _nonzero(f, x)
    mu_p = f.plateau_scale(x)
    value, error = 0.0, 0.0

    # mu in [mu_p, 1]: f(mu x) - 1, zero below the plateau exit.
    if mu_p < 1.0:
        inner = integrate(lambda mu: (f(mu[:, None] * x) - 1.0) / mu, [mu_p, 1.0], tol=0.5 * tol)
        value += inner.value
        error += inner.error

    # mu >= 1: f(mu x); the stretch [1, mu_p] lies on the plateau.
    start = max(1.0, mu_p)
    if mu_p > 1.0:
        value += math.log(mu_p)
    if start < f.support_scale(x):
        tail = improper_integral(lambda mu: f(mu[:, None] * x) / mu, start,
                                 lambda m: f.ray_value_tail(x, m), tol=0.5 * tol)
        value += tail.value
        error += tail.error

    if error > 10 * tol:
        raise NumericError("R_f quadrature did not reach tolerance",
                           {"x": x.tolist(), "error": error, "tol": tol})
    return float(value)


def grad_Rf(f: LocalisationFunction, x, tol: float = 1e-10,
            method: Literal["auto", "quadrature"] = "auto") -> np.ndarray:
    """Gradient of R_f at x != 0.

    Radial kinds (the characteristic function included) use the closed form
    ``-x/|x|^2``. Product kinds, or ``method="quadrature"`` on a smooth radial
    f, integrate ``int_0^inf (grad f)(mu x) dmu``.
    """
    x = _nonzero(f, x)
    if f.is_radial and (method == "auto" or not f.is_smooth):
        return -x / float(x @ x)
    if not f.is_smooth:
        raise UnsupportedFunctionError("no quadrature path for the characteristic function")
    mu_p = f.plateau_scale(x)
    res = improper_integral(lambda mu: f.gradient(mu[:, None] * x), mu_p,
                            lambda m: f.ray_gradient_tail(x, m), tol=tol)
    if res.error > 10 * tol:
        raise NumericError("grad R_f quadrature did not reach tolerance",
                           {"x": x.tolist(), "error": res.error, "tol": tol})
    logger.debug(f"grad_Rf quadrature: {res.intervals} intervals, error {res.error:.2e}")
    return np.asarray(res.value, dtype=float)


def check_homogeneity(f: LocalisationFunction, samples: Iterable, tol: float = 1e-7,
                      quad_tol: float = 1e-10) -> HomogeneityReport:
    """Check x.grad R_f(x) = -1 and the degree -1 homogeneity of grad R_f."""
    failures = []
    max_euler = max_scale = 0.0
    count = 0
    for i, x in enumerate(samples):
        x = np.asarray(x, dtype=float)
        g = grad_Rf(f, x, tol=quad_tol)
        euler = abs(float(x @ g) + 1.0)
        scale = 0.0
        for t in (0.5, 2.0):
            gt = grad_Rf(f, t * x, tol=quad_tol)
            scale = max(scale, float(np.max(np.abs(gt * t - g))))
        max_euler = max(max_euler, euler)
        max_scale = max(max_scale, scale)
        if euler >= tol or scale >= tol:
            failures.append(SampleDeviation(index=i, point=x.tolist(),
                                            euler_deviation=euler, scale_deviation=scale))
        count += 1
    return HomogeneityReport(samples=count, tolerance=tol, max_euler_deviation=max_euler,
                             max_scale_deviation=max_scale, failures=failures)
