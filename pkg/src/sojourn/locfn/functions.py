"""Localisation functions f: even, equal to 1 on a neighbourhood of 0, decaying.

Three built-in kinds:

* ``radial-smooth``: ``f(x) = f0(|x|)``
* ``product-smooth``: ``f(x) = prod_j f0(|x_j|)``
* ``characteristic-ball``: the indicator of the closed unit ball.

The 1-D profile is ``f0(s) = 1`` for ``s <= delta`` and
``f0(s) = (1 + (s - delta)**4) ** (-rho / 4)`` beyond, a C^2 join
(f0' and f0'' vanish at the join) with decay ``s**-rho``.
"""
import math
from enum import Enum
from typing import List

import numpy as np

from ..errors import DomainError, UnsupportedFunctionError

_SQRT_2_34 = 2.0 ** 0.75


class LocalisationKind(str, Enum):
    radial_smooth = "radial-smooth"
    product_smooth = "product-smooth"
    characteristic_ball = "characteristic-ball"


def profile(s, rho: float, delta: float):
    """1-D profile f0(s) = (1 + max(s - delta, 0)**4) ** (-rho / 4).

    This replaces the shifted bracket (1 + (s - 1)**2) ** (-(1 + rho) / 2). That
    form joins the plateau only C^1 and decays like s**-(1 + rho); here the join
    is C^2 and ``rho`` is the decay exponent itself, so a given ``rho`` gives a
    tail one power heavier. f0(3) = 1/17 at rho = 4, delta = 1.
    """
    s = np.asarray(s, dtype=float)
    u = np.maximum(s - delta, 0.0)
    return (1.0 + u ** 4) ** (-rho / 4.0)


def profile_d1(s, rho: float, delta: float):
    s = np.asarray(s, dtype=float)
    u = np.maximum(s - delta, 0.0)
    return -rho * u ** 3 * (1.0 + u ** 4) ** (-rho / 4.0 - 1.0)


def profile_d2(s, rho: float, delta: float):
    s = np.asarray(s, dtype=float)
    u = np.maximum(s - delta, 0.0)
    g = 1.0 + u ** 4
    return -rho * u ** 2 * g ** (-rho / 4.0 - 2.0) * (3.0 * g - (rho + 4.0) * u ** 4)


class LocalisationFunction:
    """An even localisation function on R^d with plateau radius ``delta``.

    ``decay_constant`` C and ``derivative_constant`` C' bound the 1-D profile:
    ``f0(s) <= C <s>^-rho`` and ``|f0'(s)| <= C' <s>^-(1+rho)``. Both follow
    from ``(1 + u^4)^(1/4) >= (1 + u) / 2^(3/4)``.
    """

    def __init__(self, kind: LocalisationKind | str, dimension: int, rho: float = 4.0, delta: float = 1.0):
        self.kind = LocalisationKind(kind)
        if dimension < 1:
            raise DomainError(f"dimension must be positive, got {dimension}")
        if not rho > 0:
            raise DomainError(f"decay exponent rho must be > 0, got {rho}")
        if not delta > 0:
            raise DomainError(f"plateau radius delta must be > 0, got {delta}")
        if self.kind is LocalisationKind.product_smooth and rho <= 1:
            raise DomainError(f"product-smooth tails need rho > 1, got {rho}")
        if self.kind is LocalisationKind.characteristic_ball:
            delta = 1.0
        self.dimension = int(dimension)
        self.rho = float(rho)
        self.delta = float(delta)
        base = (1.0 + self.delta) * _SQRT_2_34
        self.decay_constant = base ** self.rho
        self.derivative_constant = self.rho * base ** (self.rho + 1.0)

    def __repr__(self) -> str:
        return f"LocalisationFunction({self.kind.value!r}, d={self.dimension}, rho={self.rho}, delta={self.delta})"

    @property
    def is_smooth(self) -> bool:
        return self.kind is not LocalisationKind.characteristic_ball

    @property
    def is_radial(self) -> bool:
        return self.kind is not LocalisationKind.product_smooth

    @property
    def has_second_derivatives(self) -> bool:
        return self.is_smooth

    def _points(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dimension:
            raise DomainError(f"expected points in R^{self.dimension}, got shape {x.shape}")
        return x

    def evaluate(self, x):
        """f at points ``x`` of shape ``(..., d)``."""
        x = self._points(x)
        if self.kind is LocalisationKind.characteristic_ball:
            return (np.linalg.norm(x, axis=-1) <= 1.0).astype(float)
        if self.kind is LocalisationKind.radial_smooth:
            return profile(np.linalg.norm(x, axis=-1), self.rho, self.delta)
        return np.prod(profile(np.abs(x), self.rho, self.delta), axis=-1)

    __call__ = evaluate

    def gradient(self, x):
        if not self.is_smooth:
            raise UnsupportedFunctionError("the characteristic function has no gradient")
        x = self._points(x)
        if self.kind is LocalisationKind.radial_smooth:
            s = np.linalg.norm(x, axis=-1)
            safe = np.where(s > 0, s, 1.0)
            return (profile_d1(s, self.rho, self.delta) / safe)[..., None] * x
        a = np.abs(x)
        vals = profile(a, self.rho, self.delta)
        ders = profile_d1(a, self.rho, self.delta) * np.sign(x)
        out = np.empty_like(x)
        for j in range(self.dimension):
            others = np.prod(np.delete(vals, j, axis=-1), axis=-1)
            out[..., j] = ders[..., j] * others
        return out

    def second_derivatives(self, x):
        if not self.is_smooth:
            raise UnsupportedFunctionError("the characteristic function has no second derivatives")
        x = self._points(x)
        d = self.dimension
        if self.kind is LocalisationKind.radial_smooth:
            s = np.linalg.norm(x, axis=-1)
            safe = np.where(s > 0, s, 1.0)
            f1 = profile_d1(s, self.rho, self.delta)
            f2 = profile_d2(s, self.rho, self.delta)
            xhat = x / safe[..., None]
            outer = xhat[..., :, None] * xhat[..., None, :]
            eye = np.eye(d)
            return (f2[..., None, None] * outer
                    + (f1 / safe)[..., None, None] * (eye - outer))
        a = np.abs(x)
        sg = np.sign(x)
        vals = profile(a, self.rho, self.delta)
        d1 = profile_d1(a, self.rho, self.delta) * sg
        d2 = profile_d2(a, self.rho, self.delta)
        out = np.empty(x.shape + (d,))
        for i in range(d):
            for j in range(d):
                factors = vals.copy()
                if i == j:
                    factors[..., i] = d2[..., i]
                else:
                    factors[..., i] = d1[..., i]
                    factors[..., j] = d1[..., j]
                out[..., i, j] = np.prod(factors, axis=-1)
        return out

    # Scales along a ray mu -> mu*x.

    def plateau_scale(self, x) -> float:
        """Largest mu with f(mu*x) = 1 for all smaller mu."""
        x = self._points(x)
        n = float(np.max(np.abs(x))) if self.kind is LocalisationKind.product_smooth else float(np.linalg.norm(x))
        return self.delta / n if n > 0 else math.inf

    def support_scale(self, x) -> float:
        """Smallest mu with f(nu*x) = 0 for all nu > mu (inf for smooth kinds)."""
        if self.is_smooth:
            return math.inf
        n = float(np.linalg.norm(self._points(x)))
        return 1.0 / n if n > 0 else math.inf

    def ray_value_tail(self, x, mu: float) -> float:
        """Bound on the integral of f(nu*x)/nu over nu in [mu, inf)."""
        x = self._points(x)
        if not self.is_smooth:
            return 0.0 if mu >= self.support_scale(x) else math.inf
        if self.kind is LocalisationKind.radial_smooth:
            n = float(np.linalg.norm(x))
            return self.decay_constant * (mu * n) ** -self.rho / self.rho
        nz = np.abs(x[np.abs(x) > 0])
        m = nz.size
        coeff = np.prod(self.decay_constant * nz ** -self.rho)
        return float(coeff * mu ** (-self.rho * m) / (self.rho * m))

    def ray_gradient_tail(self, x, mu: float) -> float:
        """Bound on the integral of |grad f(nu*x)|_1 over nu in [mu, inf)."""
        x = self._points(x)
        if self.kind is LocalisationKind.radial_smooth:
            n = float(np.linalg.norm(x))
            return self.derivative_constant * n ** (-1 - self.rho) * mu ** -self.rho / self.rho
        if not self.is_smooth:
            raise UnsupportedFunctionError("the characteristic function has no gradient")
        nz = np.abs(x[np.abs(x) > 0])
        m = nz.size
        total = 0.0
        for j in range(m):
            others = np.prod(self.decay_constant * np.delete(nz, j) ** -self.rho)
            coeff = self.derivative_constant * nz[j] ** (-1 - self.rho) * others
            expo = self.rho * m
            total += coeff * mu ** -expo / expo
        return float(total)

    # Truncation for pair integrals t -> f((x -+ t y)/r).

    def difference_tail(self, x, y, r: float, t: float) -> float:
        """Bound on 1/2 * integral over s >= t of |f((x - s y)/r) - f((x + s y)/r)|.

        The same bound dominates the half-sum over integers n > t.
        """
        x, y = self._points(x), self._points(y)
        nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
        if nx == 0:
            return 0.0
        if self.kind is LocalisationKind.characteristic_ball:
            return 0.0 if t * ny >= r + nx else math.inf
        if self.kind is LocalisationKind.radial_smooth:
            u = (t * ny - nx) / r
            if u <= 0:
                return math.inf
            return nx * self.derivative_constant * u ** -self.rho / (self.rho * ny)
        j = int(np.argmax(np.abs(y)))
        yj, xj = abs(float(y[j])), abs(float(x[j]))
        u = (t * yj - xj) / r
        if u <= 0:
            return math.inf
        g = math.sqrt(self.dimension) * self.derivative_constant * self.decay_constant
        return nx * g * u ** (1 - self.rho) / ((self.rho - 1) * yj)

    def truncation_time(self, x, y, r: float, tol: float) -> float:
        """Smallest t with ``difference_tail(x, y, r, t) <= tol`` (closed form)."""
        x, y = self._points(x), self._points(y)
        nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
        if ny == 0:
            raise DomainError("truncation time undefined for y = 0")
        exit_time = (r + nx) / ny
        if nx == 0 or self.kind is LocalisationKind.characteristic_ball:
            return exit_time
        if self.kind is LocalisationKind.radial_smooth:
            u = (nx * self.derivative_constant / (self.rho * ny * tol)) ** (1.0 / self.rho)
            return max(exit_time, (r * u + nx) / ny)
        j = int(np.argmax(np.abs(y)))
        yj, xj = abs(float(y[j])), abs(float(x[j]))
        g = math.sqrt(self.dimension) * self.derivative_constant * self.decay_constant
        u = (nx * g / ((self.rho - 1) * yj * tol)) ** (1.0 / (self.rho - 1))
        return max(exit_time, (r * u + xj) / yj)

    def kink_times(self, x, y, r: float) -> List[float]:
        """Times t >= 0 where (x -+ t y)/r crosses the plateau or support boundary."""
        x, y = self._points(x), self._points(y)
        out = set()
        if self.kind is LocalisationKind.product_smooth:
            level = self.delta * r
            for sgn in (-1.0, 1.0):
                for xj, yj in zip(x, y):
                    if yj == 0:
                        continue
                    for c in (level, -level):
                        t = (c - xj) / (sgn * yj)
                        if t > 0:
                            out.add(float(t))
            return sorted(out)
        levels = {self.delta * r, r}
        a = float(y @ y)
        if a == 0:
            return []
        for sgn in (-1.0, 1.0):
            b = 2.0 * sgn * float(x @ y)
            for level in levels:
                c = float(x @ x) - level * level
                disc = b * b - 4 * a * c
                if disc < 0:
                    continue
                sq = math.sqrt(disc)
                for t in ((-b - sq) / (2 * a), (-b + sq) / (2 * a)):
                    if t > 0:
                        out.add(t)
        return sorted(out)


def radial_smooth(dimension: int, rho: float = 4.0, delta: float = 1.0) -> LocalisationFunction:
    return LocalisationFunction(LocalisationKind.radial_smooth, dimension, rho, delta)


def product_smooth(dimension: int, rho: float = 4.0, delta: float = 1.0) -> LocalisationFunction:
    return LocalisationFunction(LocalisationKind.product_smooth, dimension, rho, delta)


def characteristic_ball(dimension: int) -> LocalisationFunction:
    return LocalisationFunction(LocalisationKind.characteristic_ball, dimension, rho=1.0, delta=1.0)
