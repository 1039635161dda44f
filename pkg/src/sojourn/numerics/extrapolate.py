"""Limit estimation for sequences sampled on a geometric radii schedule."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    rate: float
    method: str


def extrapolate_power_tail(radii: Sequence[float], values: Sequence[float], *,
                           noise: float = 1e-13) -> Extrapolation:
    """Fit ``value(r) = L + a r**-beta`` through the last three samples.

    On a geometric schedule this is Aitken's delta-squared step. When the two
    last differences sit at the noise level, have mixed signs, or do not
    shrink, the last value is returned unchanged with ``rate = nan``.
    """
    if len(values) < 3:
        return Extrapolation(float(values[-1]), float("nan"), "last")
    r1, r2, r3 = (float(r) for r in radii[-3:])
    v1, v2, v3 = (float(v) for v in values[-3:])
    d1, d2 = v2 - v1, v3 - v2
    floor = noise * max(1.0, abs(v3))
    if abs(d1) <= floor or abs(d2) <= floor:
        return Extrapolation(v3, float("nan"), "last")
    q = d2 / d1
    if not 0.0 < q < 1.0:
        return Extrapolation(v3, float("nan"), "last")
    beta = -np.log(q) / np.log(r3 / r2)
    return Extrapolation(v3 + d2 * q / (1.0 - q), float(beta), "aitken")


def fitted_rate(radii: Sequence[float], errors: Sequence[float]) -> float:
    """Empirical decay exponent from a log-log fit of the last three errors."""
    r = np.asarray(radii[-3:], dtype=float)
    e = np.asarray(errors[-3:], dtype=float)
    if r.size < 3 or np.any(e <= 0) or not np.all(np.isfinite(e)):
        return float("nan")
    slope = np.polyfit(np.log(r), np.log(e), 1)[0]
    return float(-slope)


def errors_decreasing(errors: Sequence[float], floor: float) -> bool:
    """True when each of the last three errors is below its predecessor or under ``floor``."""
    tail = list(errors[-3:])
    return all(b <= a or b <= floor for a, b in zip(tail, tail[1:]))
