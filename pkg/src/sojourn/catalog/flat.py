"""Systems on flat phase space R^2n whose flows are known in closed form.

Position-type (Friedrichs, kinetic), momentum-type (Stark), dilation-type
(homogeneous kinetic energy, inverse-square potential) and the ratio system
with grad H = H^2 - 4.
"""
from enum import Enum
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import quad_vec

from ..dynamics.system import FlowKind, HamiltonianSystem


class Dispersion(str, Enum):
    quadratic = "quadratic"
    relativistic = "relativistic"


def kinetic_energy(p, dispersion: Dispersion):
    p2 = np.sum(np.asarray(p) ** 2, axis=-1)
    return 0.5 * p2 if dispersion is Dispersion.quadratic else np.sqrt(1.0 + p2)


def kinetic_velocity(p, dispersion: Dispersion):
    p = np.asarray(p, dtype=float)
    if dispersion is Dispersion.quadratic:
        return p.copy()
    return p / np.sqrt(1.0 + np.sum(p * p, axis=-1, keepdims=True))


def _nonzero_vector(v: List[float]) -> List[float]:
    if not v:
        raise ValueError("v must have at least one component")
    if not any(abs(x) > 0 for x in v):
        raise ValueError("v must be non-zero")
    return v


def _sample_momenta(rng: np.random.Generator, count: int, n: int, low: float = 0.5, high: float = 2.0):
    """Momenta with |p| uniform in [low, high] and uniform direction."""
    direction = rng.normal(size=(count, n))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    return direction * rng.uniform(low, high, size=(count, 1))


# Friedrichs-type: H = v.p + V(q), Phi = q


class FriedrichsParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: List[float] = Field(default_factory=lambda: [1.0])
    potential: Literal["gaussian", "none"] = "gaussian"
    amplitude: float = 1.0
    width: float = Field(1.0, gt=0)

    @field_validator("v")
    @classmethod
    def _check_v(cls, v):
        return _nonzero_vector(v)


class Friedrichs(HamiltonianSystem):
    """H = v.p + a exp(-|q|^2 / 2w^2), Phi = q, grad H = v.

    The momentum transfer int_0^t grad V(q + v s) ds is integrated with
    ``quad_vec`` over the stretch of the line where V exceeds ``a e^-50``;
    outside it the transfer is constant.
    """

    name = "friedrichs"
    anchor = "flat: Friedrichs-type Hamiltonian with position function"
    domain_description = "(q, p) in R^2n"
    _REACH = 10.0

    def __init__(self, v, potential: str = "gaussian", amplitude: float = 1.0, width: float = 1.0,
                 drift_budget: float = 1e-10):
        v = np.asarray(v, dtype=float)
        super().__init__(v.size, v.size, drift_budget)
        self.v = v
        self.amplitude = float(amplitude) if potential == "gaussian" else 0.0
        self.width = float(width)

    @classmethod
    def from_params(cls, params: FriedrichsParams, drift_budget: float) -> "Friedrichs":
        return cls(params.v, params.potential, params.amplitude, params.width, drift_budget)

    def potential(self, q):
        q = np.asarray(q, dtype=float)
        return self.amplitude * np.exp(-np.sum(q * q, axis=-1) / (2.0 * self.width ** 2))

    def potential_gradient(self, q):
        q = np.asarray(q, dtype=float)
        return -(q / self.width ** 2) * self.potential(q)[..., None]

    def hamiltonian(self, z):
        q, p = self.split(z)
        return p @ self.v + self.potential(q)

    def phi(self, z):
        q, _ = self.split(z)
        return q.copy()

    def partials(self, z):
        q, p = self.split(z)
        return self.potential_gradient(q), np.broadcast_to(self.v, p.shape).copy()

    def nabla_h_closed(self, z):
        return self.v.copy()

    def sample(self, rng, count):
        return rng.normal(0.0, 2.0, size=(count, 2 * self.n))

    def momentum_transfer(self, q, t) -> np.ndarray:
        """int_0^t grad V(q + v s) ds for every t in the array ``t``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros((t.size, self.n))
        if self.amplitude == 0.0:
            return out
        vv = float(self.v @ self.v)
        closest = -float(q @ self.v) / vv
        miss2 = float(q @ q) - float(q @ self.v) ** 2 / vv
        reach2 = (self._REACH * self.width) ** 2 - miss2
        if reach2 <= 0:
            return out
        half = np.sqrt(reach2 / vv)
        lo, hi = closest - half, closest + half
        start = min(max(0.0, lo), hi)
        ends, inverse = np.unique(np.clip(t, lo, hi), return_inverse=True)
        span = ends - start
        if not np.any(span):
            return out

        def integrand(u):
            s = start + u * span
            return span[:, None] * self.potential_gradient(q + s[:, None] * self.v)

        value, _ = quad_vec(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
        return value[np.ravel(inverse)]

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)
        return self.join(q + t[:, None] * self.v, p - self.momentum_transfer(q, t))


# Stark-type: H = h(p) + v.q, Phi = p


class StarkParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    v: List[float] = Field(default_factory=lambda: [1.0])
    dispersion: Dispersion = Dispersion.quadratic

    @field_validator("v")
    @classmethod
    def _check_v(cls, v):
        return _nonzero_vector(v)


class Stark(HamiltonianSystem):
    """H = h(p) + v.q with Phi = p and grad H = -v."""

    name = "stark"
    anchor = "flat: Stark-type Hamiltonian with momentum function"
    domain_description = "(q, p) in R^2n"

    def __init__(self, v, dispersion: Dispersion = Dispersion.quadratic, drift_budget: float = 1e-10):
        v = np.asarray(v, dtype=float)
        super().__init__(v.size, v.size, drift_budget)
        self.v = v
        self.dispersion = Dispersion(dispersion)

    @classmethod
    def from_params(cls, params: StarkParams, drift_budget: float) -> "Stark":
        return cls(params.v, params.dispersion, drift_budget)

    def hamiltonian(self, z):
        q, p = self.split(z)
        return kinetic_energy(p, self.dispersion) + q @ self.v

    def phi(self, z):
        _, p = self.split(z)
        return p.copy()

    def partials(self, z):
        q, p = self.split(z)
        return np.broadcast_to(self.v, q.shape).copy(), kinetic_velocity(p, self.dispersion)

    def nabla_h_closed(self, z):
        return -self.v

    def sample(self, rng, count):
        return rng.normal(0.0, 2.0, size=(count, 2 * self.n))

    def displacement(self, p, t) -> np.ndarray:
        """int_0^t grad h(p - v s) ds."""
        t = np.asarray(t, dtype=float)[:, None]
        if self.dispersion is Dispersion.quadratic:
            return p * t - 0.5 * self.v * t * t
        speed = float(np.linalg.norm(self.v))
        axis = self.v / speed
        along = float(p @ axis)
        across = p - along * axis
        c2 = 1.0 + float(across @ across)
        c = np.sqrt(c2)
        w = along - speed * t
        return (across * (np.arcsinh(along / c) - np.arcsinh(w / c))
                + axis * (np.sqrt(c2 + along * along) - np.sqrt(c2 + w * w))) / speed

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)
        return self.join(q + self.displacement(p, t), p - t[:, None] * self.v)


# Purely kinetic: H = h(p), Phi = q


class KineticParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(1, ge=1)
    dispersion: Dispersion = Dispersion.quadratic


class Kinetic(HamiltonianSystem):
    name = "kinetic"
    anchor = "flat: purely kinetic Hamiltonian with position function"
    domain_description = "(q, p) in R^2n"

    def __init__(self, n: int = 1, dispersion: Dispersion = Dispersion.quadratic, drift_budget: float = 1e-10):
        super().__init__(n, n, drift_budget)
        self.dispersion = Dispersion(dispersion)

    @classmethod
    def from_params(cls, params: KineticParams, drift_budget: float) -> "Kinetic":
        return cls(params.n, params.dispersion, drift_budget)

    def hamiltonian(self, z):
        _, p = self.split(z)
        return kinetic_energy(p, self.dispersion)

    def phi(self, z):
        q, _ = self.split(z)
        return q.copy()

    def partials(self, z):
        q, p = self.split(z)
        return np.zeros_like(q), kinetic_velocity(p, self.dispersion)

    def nabla_h_closed(self, z):
        _, p = self.split(z)
        return kinetic_velocity(p, self.dispersion)

    def sample(self, rng, count):
        q = rng.normal(0.0, 2.0, size=(count, self.n))
        return self.join(q, _sample_momenta(rng, count, self.n))

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)
        qt = q + t[:, None] * kinetic_velocity(p, self.dispersion)
        return self.join(qt, np.broadcast_to(p, qt.shape))


# Dilation generator: Phi = q.p / alpha, grad H = H


class DilationParams(BaseModel):
    """``case="i"``: H = |p|^alpha / alpha. ``case="ii"``: H = (|p|^2 + K |q|^-2) / 2."""

    model_config = ConfigDict(extra="forbid")

    case: Literal["i", "ii"] = "i"
    n: int = Field(1, ge=1)
    alpha: float = Field(2.0, gt=1)
    K: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _alpha_only_free(self):
        if self.case == "ii" and self.alpha != 2.0:
            raise ValueError("case 'ii' fixes alpha = 2")
        return self


class HomogeneousDilation(HamiltonianSystem):
    name = "dilation_homogeneous"
    anchor = "flat: dilation generator, homogeneous kinetic energy"
    domain_description = "(q, p) in R^2n"

    def __init__(self, n: int = 1, alpha: float = 2.0, drift_budget: float = 1e-10):
        super().__init__(n, 1, drift_budget)
        self.alpha = float(alpha)

    def _velocity(self, p):
        norm = np.linalg.norm(p, axis=-1, keepdims=True)
        safe = np.where(norm > 0, norm, 1.0)
        return np.where(norm > 0, safe ** (self.alpha - 2.0) * p, 0.0)

    def hamiltonian(self, z):
        _, p = self.split(z)
        return np.linalg.norm(p, axis=-1) ** self.alpha / self.alpha

    def phi(self, z):
        q, p = self.split(z)
        return (np.sum(q * p, axis=-1) / self.alpha)[..., None]

    def partials(self, z):
        q, p = self.split(z)
        return np.zeros_like(q), self._velocity(p)

    def nabla_h_closed(self, z):
        return np.array([float(self.hamiltonian(z))])

    def gradient_law(self, h):
        return h

    def sample(self, rng, count):
        q = rng.normal(0.0, 2.0, size=(count, self.n))
        return self.join(q, _sample_momenta(rng, count, self.n))

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)
        qt = q + t[:, None] * self._velocity(p)
        return self.join(qt, np.broadcast_to(p, qt.shape))


class InverseSquareDilation(HamiltonianSystem):
    """H = (|p|^2 + K |q|^-2) / 2 on (R^n \\ {0}) x R^n, integrated numerically.

    |q(t)|^2 = |q|^2 + 2 (q.p) t + 2 H t^2 stays positive, so orbits never
    reach the origin.
    """

    name = "dilation_homogeneous"
    anchor = "flat: dilation generator, inverse-square potential"
    flow_kind = FlowKind.splitting
    domain_description = "q != 0"

    def __init__(self, n: int = 1, K: float = 1.0, drift_budget: float = 1e-10):
        super().__init__(n, 1, drift_budget)
        self.K = float(K)

    def in_domain(self, z) -> bool:
        q, _ = self.split(z)
        return super().in_domain(z) and bool(np.linalg.norm(q) > 0)

    def hamiltonian(self, z):
        q, p = self.split(z)
        return 0.5 * (np.sum(p * p, axis=-1) + self.K / np.sum(q * q, axis=-1))

    def phi(self, z):
        q, p = self.split(z)
        return (0.5 * np.sum(q * p, axis=-1))[..., None]

    def potential_gradient(self, q):
        q = np.asarray(q, dtype=float)
        return -self.K * q / np.sum(q * q, axis=-1, keepdims=True) ** 2

    def kinetic_gradient(self, p):
        return np.asarray(p, dtype=float)

    def partials(self, z):
        q, p = self.split(z)
        return self.potential_gradient(q), p.copy()

    def nabla_h_closed(self, z):
        return np.array([float(self.hamiltonian(z))])

    def gradient_law(self, h):
        return h

    def closest_approach(self, z) -> float:
        """min over t of |q(t)|."""
        q, p = self.split(self.require(z))
        h = float(self.hamiltonian(z))
        return float(np.sqrt(max(q @ q - (q @ p) ** 2 / (2.0 * h), 0.0)))

    def sample(self, rng, count):
        out = []
        while len(out) < count:
            q = _sample_momenta(rng, 1, self.n, 1.0, 3.0)[0]
            p = rng.normal(0.0, 1.0, size=self.n)
            z = self.join(q, p)
            if 0.5 <= float(self.hamiltonian(z)) <= 2.0 and self.closest_approach(z) >= 0.5:
                out.append(z)
        return np.array(out)


def build_dilation(params: DilationParams, drift_budget: float) -> HamiltonianSystem:
    if params.case == "i":
        return HomogeneousDilation(params.n, params.alpha, drift_budget)
    return InverseSquareDilation(params.n, params.K, drift_budget)


# Ratio system on the open quadrant: grad H = H^2 - 4


class RatioParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RatioHomogeneous(HamiltonianSystem):
    """H = q2/q1 + q1/q2, Phi = p1 q2 + p2 q1 on q1, q2 > 0; Crit is the diagonal q1 = q2."""

    name = "ratio_homogeneous"
    anchor = "flat: degree-zero Hamiltonian with grad H = H^2 - 4"
    domain_description = "q1 > 0 and q2 > 0"

    def __init__(self, drift_budget: float = 1e-10):
        super().__init__(2, 1, drift_budget)

    @classmethod
    def from_params(cls, params: RatioParams, drift_budget: float) -> "RatioHomogeneous":
        return cls(drift_budget)

    def in_domain(self, z) -> bool:
        q, _ = self.split(z)
        return super().in_domain(z) and bool(q[0] > 0 and q[1] > 0)

    def hamiltonian(self, z):
        q, _ = self.split(z)
        return q[..., 1] / q[..., 0] + q[..., 0] / q[..., 1]

    def phi(self, z):
        q, p = self.split(z)
        return (p[..., 0] * q[..., 1] + p[..., 1] * q[..., 0])[..., None]

    def partials(self, z):
        q, p = self.split(z)
        q1, q2 = q[..., 0], q[..., 1]
        dq = np.stack([1.0 / q2 - q2 / q1 ** 2, 1.0 / q1 - q1 / q2 ** 2], axis=-1)
        return dq, np.zeros_like(p)

    def nabla_h_closed(self, z):
        h = float(self.hamiltonian(z))
        return np.array([h * h - 4.0])

    def gradient_law(self, h):
        return h * h - 4.0

    def sample(self, rng, count):
        out = []
        while len(out) < count:
            q = rng.uniform(0.3, 3.0, size=2)
            if abs(np.log(q[0] / q[1])) > 0.2:
                out.append(self.join(q, rng.normal(0.0, 2.0, size=2)))
        return np.array(out)

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)
        dq, _ = self.partials(z)
        pt = p - t[:, None] * dq
        return self.join(np.broadcast_to(q, pt.shape), pt)
