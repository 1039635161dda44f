"""Systems whose Phi only exists on part of phase space.

Each restricts the domain (or smooths Phi by a first integral) so that
{Phi_j, H} is constant along orbits.
"""
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..dynamics.system import FlowKind, HamiltonianSystem
from ..numerics.elliptic import elliptic_F

_SMOOTHING_CUTOFF = 1e-30


def _unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    u = rng.normal(size=(count, n))
    return u / np.linalg.norm(u, axis=-1, keepdims=True)


def _orthogonal_unit(rng: np.random.Generator, u: np.ndarray) -> np.ndarray:
    while True:
        w = rng.normal(size=u.size)
        w -= (w @ u) * u
        norm = np.linalg.norm(w)
        if norm > 1e-3:
            return w / norm


# Repulsive harmonic potential


class RepulsiveHarmonicParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(1, ge=1)
    K: float = Field(1.0, gt=0)
    smoothed: bool = True


class RepulsiveHarmonic(HamiltonianSystem):
    """H = (|p|^2 - K^2 |q|^2) / 2 = sum_j H_j.

    Unsmoothed, Phi_j = ln|(p_j + K q_j) / (p_j - K q_j)| / 2K has
    {Phi_j, H} = 1 away from the lines H_j = 0. Smoothed, Phi_j is multiplied
    by the first integral exp(-H_j^-2), which vanishes to all orders there, so
    Phi is defined everywhere and grad H_j = exp(-H_j^-2).
    """

    name = "repulsive_harmonic"
    anchor = "confined: repulsive harmonic potential"

    def __init__(self, n: int = 1, K: float = 1.0, smoothed: bool = True, drift_budget: float = 1e-10):
        super().__init__(n, n, drift_budget)
        self.K = float(K)
        self.smoothed = bool(smoothed)
        self.domain_description = ("(q, p) in R^2n" if smoothed
                                   else "p_j != +-K q_j for every j (H_j != 0)")

    @classmethod
    def from_params(cls, params: RepulsiveHarmonicParams, drift_budget: float) -> "RepulsiveHarmonic":
        return cls(params.n, params.K, params.smoothed, drift_budget)

    def component_energies(self, z):
        q, p = self.split(z)
        return 0.5 * (p * p - self.K ** 2 * q * q)

    def smoothing(self, hj):
        hj = np.asarray(hj, dtype=float)
        out = np.zeros_like(hj)
        live = np.abs(hj) >= _SMOOTHING_CUTOFF
        out[live] = np.exp(-hj[live] ** -2.0)
        return out

    def in_domain(self, z) -> bool:
        if not super().in_domain(z):
            return False
        return self.smoothed or bool(np.all(self.component_energies(z) != 0))

    def hamiltonian(self, z):
        return np.sum(self.component_energies(z), axis=-1)

    def raw_phi(self, z):
        q, p = self.split(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs((p + self.K * q) / (p - self.K * q))) / (2.0 * self.K)

    def phi(self, z):
        raw = self.raw_phi(z)
        if not self.smoothed:
            return raw
        factor = self.smoothing(self.component_energies(z))
        return np.where(factor > 0, raw, 0.0) * factor

    def partials(self, z):
        q, p = self.split(z)
        return -self.K ** 2 * q, p.copy()

    def nabla_h_closed(self, z):
        if not self.smoothed:
            return np.ones(self.d)
        return self.smoothing(self.component_energies(z))

    def sample(self, rng, count):
        size = (count, self.n)
        p = rng.choice([-1.0, 1.0], size=size) * rng.uniform(1.6, 2.6, size=size)
        q = rng.uniform(-0.5, 0.5, size=size) * np.abs(p) / self.K
        return self.join(q, p)

    def exact_flow(self, t, z):
        q, p = self.split(z)
        t = np.asarray(t, dtype=float)[:, None]
        grow = (p + self.K * q) * np.exp(self.K * t)
        decay = (p - self.K * q) * np.exp(-self.K * t)
        return self.join((grow - decay) / (2.0 * self.K), 0.5 * (grow + decay))


# Simple pendulum on its rotating region


class PendulumParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    K: float = Field(1.0, gt=0)


class Pendulum(HamiltonianSystem):
    """H = p^2/2 + K sin^2(q/2) on the rotating region H > K.

    Phi = sqrt(2/H) F(q/2 | sqrt(K/H)) with F continued past |q/2| = pi/2
    by quasi-periodicity; {Phi, H} = sign(p).
    """

    name = "pendulum"
    anchor = "confined: simple pendulum, rotating orbits"
    flow_kind = FlowKind.splitting
    domain_description = "p^2/2 > K cos^2(q/2)"

    def __init__(self, K: float = 1.0, drift_budget: float = 1e-10):
        super().__init__(1, 1, drift_budget)
        self.K = float(K)

    @classmethod
    def from_params(cls, params: PendulumParams, drift_budget: float) -> "Pendulum":
        return cls(params.K, drift_budget)

    def in_domain(self, z) -> bool:
        if not super().in_domain(z):
            return False
        q, p = self.split(z)
        return bool(0.5 * p[0] ** 2 > self.K * np.cos(0.5 * q[0]) ** 2)

    def hamiltonian(self, z):
        q, p = self.split(z)
        return 0.5 * p[..., 0] ** 2 + self.K * np.sin(0.5 * q[..., 0]) ** 2

    def phi(self, z):
        q, _ = self.split(z)
        h = self.hamiltonian(z)
        return (np.sqrt(2.0 / h) * elliptic_F(0.5 * q[..., 0], np.sqrt(self.K / h)))[..., None]

    def kinetic_gradient(self, p):
        return np.asarray(p, dtype=float)

    def potential_gradient(self, q):
        return 0.5 * self.K * np.sin(np.asarray(q, dtype=float))

    def partials(self, z):
        q, p = self.split(z)
        return self.potential_gradient(q), p.copy()

    def nabla_h_closed(self, z):
        _, p = self.split(z)
        return np.sign(p)

    def sample(self, rng, count):
        q = rng.uniform(-np.pi, np.pi, size=count)
        h = self.K * (1.0 + rng.uniform(0.3, 2.0, size=count))
        p = rng.choice([-1.0, 1.0], size=count) * np.sqrt(2.0 * (h - self.K * np.sin(0.5 * q) ** 2))
        return np.stack([q, p], axis=-1)


# Central force, unbounded orbits


class CentralForceParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(2, ge=1)
    K: float = 1.0
    branch: Literal["0", "+", "-"] = "0"

    @model_validator(mode="after")
    def _coupling(self):
        if self.K == 0:
            raise ValueError("K must be non-zero")
        if self.K > 0 and self.n < 2:
            raise ValueError("the attractive case needs n >= 2 (non-zero angular momentum)")
        return self


class CentralForce(HamiltonianSystem):
    """H = |p|^2/2 - K/(2|q|), integrated with DOP853.

    With s = sqrt(2H) and g_+- = |q|(2H + |p|^2) +- 2 s p.q,

        Phi_+- = p.q/2H -+ K/(2 s^3) ln g_+-
        Phi_0  = p.q/2H - K/(2 s^3) artanh(2 s p.q / (|q|(2H + |p|^2)))

    and {Phi, H} = 1 on every branch. For K > 0 the domain is H > 0 with
    non-zero angular momentum; for K < 0 it is q != 0.
    """

    name = "central_force"
    anchor = "confined: unbounded orbits of a central force"
    flow_kind = FlowKind.adaptive

    def __init__(self, n: int = 2, K: float = 1.0, branch: str = "0", drift_budget: float = 1e-10):
        super().__init__(n, 1, drift_budget)
        self.K = float(K)
        self.branch = branch
        self.domain_description = ("H > 0 and sum_ij L_ij^2 > 0" if self.K > 0 else "q != 0")

    @classmethod
    def from_params(cls, params: CentralForceParams, drift_budget: float) -> "CentralForce":
        return cls(params.n, params.K, params.branch, drift_budget)

    def angular_momentum(self, z):
        q, p = self.split(z)
        i, j = np.triu_indices(self.n, k=1)
        return q[..., i] * p[..., j] - q[..., j] * p[..., i]

    def first_integrals(self, z) -> Optional[np.ndarray]:
        return self.angular_momentum(z) if self.n > 1 else None

    def in_domain(self, z) -> bool:
        if not super().in_domain(z):
            return False
        q, _ = self.split(z)
        if not np.linalg.norm(q) > 0:
            return False
        if self.K < 0:
            return True
        return bool(self.hamiltonian(z) > 0 and np.sum(self.angular_momentum(z) ** 2) > 0)

    def hamiltonian(self, z):
        q, p = self.split(z)
        return 0.5 * np.sum(p * p, axis=-1) - 0.5 * self.K / np.linalg.norm(q, axis=-1)

    def log_arguments(self, z):
        """(g_+, g_-), both positive on the domain."""
        q, p = self.split(z)
        h = self.hamiltonian(z)
        s = np.sqrt(2.0 * h)
        base = np.linalg.norm(q, axis=-1) * (2.0 * h + np.sum(p * p, axis=-1))
        pq = np.sum(p * q, axis=-1)
        return base + 2.0 * s * pq, base - 2.0 * s * pq

    def branch_value(self, z, branch: str):
        q, p = self.split(z)
        h = self.hamiltonian(z)
        s = np.sqrt(2.0 * h)
        pq = np.sum(p * q, axis=-1)
        coeff = self.K / (2.0 * s ** 3)
        if branch == "0":
            base = np.linalg.norm(q, axis=-1) * (2.0 * h + np.sum(p * p, axis=-1))
            return pq / (2.0 * h) - coeff * np.arctanh(2.0 * s * pq / base)
        plus, minus = self.log_arguments(z)
        if branch == "+":
            return pq / (2.0 * h) - coeff * np.log(plus)
        return pq / (2.0 * h) + coeff * np.log(minus)

    def phi(self, z):
        return np.asarray(self.branch_value(z, self.branch))[..., None]

    def partials(self, z):
        q, p = self.split(z)
        r = np.linalg.norm(q, axis=-1, keepdims=True)
        return 0.5 * self.K * q / r ** 3, p.copy()

    def nabla_h_closed(self, z):
        return np.ones(1)

    def gradient_law(self, h):
        return 1.0

    def sample(self, rng, count):
        q_dir = _unit_vectors(rng, count, self.n)
        radius = rng.uniform(1.0, 3.0, size=count)
        energy = rng.uniform(0.3, 1.5, size=count)
        out = np.empty((count, 2 * self.n))
        for i in range(count):
            q = q_dir[i] * radius[i]
            speed2 = 2.0 * energy[i] + self.K / radius[i]
            if self.K < 0:
                speed2 = max(speed2, 0.0) + 0.5
            if self.n == 1:
                direction = q_dir[i] * rng.choice([-1.0, 1.0])
            else:
                angle = rng.uniform(0.3, np.pi - 0.3)
                direction = np.cos(angle) * q_dir[i] + np.sin(angle) * _orthogonal_unit(rng, q_dir[i])
            out[i] = np.concatenate([q, np.sqrt(speed2) * direction])
        return out


# Geodesics of the Poincare ball


class PoincareBallParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(2, ge=1)


class PoincareBall(HamiltonianSystem):
    """Geodesic flow H = |p|^2 (1 - |q|^2)^2 / 8 on the unit ball.

    Phi = exp(-1/H) artanh(2 p.q / (|p| (1 + |q|^2))) and
    grad H = exp(-1/H) sqrt(2H). The factor underflows to 0 for small H,
    where points are effectively critical.
    """

    name = "poincare_ball"
    anchor = "confined: geodesic flow of the Poincare ball"
    flow_kind = FlowKind.adaptive
    domain_description = "|q| < 1"

    def __init__(self, n: int = 2, drift_budget: float = 1e-10):
        super().__init__(n, 1, drift_budget)

    @classmethod
    def from_params(cls, params: PoincareBallParams, drift_budget: float) -> "PoincareBall":
        return cls(params.n, drift_budget)

    def in_domain(self, z) -> bool:
        q, _ = self.split(z)
        return super().in_domain(z) and bool(q @ q < 1.0)

    def hamiltonian(self, z):
        q, p = self.split(z)
        return 0.125 * np.sum(p * p, axis=-1) * (1.0 - np.sum(q * q, axis=-1)) ** 2

    @staticmethod
    def _factor(h):
        h = np.asarray(h, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(h > 0, np.exp(-1.0 / np.where(h > 0, h, 1.0)), 0.0)

    def artanh_argument(self, z):
        q, p = self.split(z)
        norm_p = np.linalg.norm(p, axis=-1)
        safe = np.where(norm_p > 0, norm_p, 1.0)
        arg = 2.0 * np.sum(p * q, axis=-1) / (safe * (1.0 + np.sum(q * q, axis=-1)))
        return np.where(norm_p > 0, arg, 0.0)

    def phi(self, z):
        return (self._factor(self.hamiltonian(z)) * np.arctanh(self.artanh_argument(z)))[..., None]

    def partials(self, z):
        q, p = self.split(z)
        gap = 1.0 - np.sum(q * q, axis=-1, keepdims=True)
        return -0.5 * np.sum(p * p, axis=-1, keepdims=True) * gap * q, 0.25 * p * gap ** 2

    def nabla_h_closed(self, z):
        h = float(self.hamiltonian(z))
        return np.array([self.gradient_law(h)])

    def gradient_law(self, h):
        return float(self._factor(h) * np.sqrt(2.0 * h))

    def sample(self, rng, count):
        q = _unit_vectors(rng, count, self.n) * rng.uniform(0.0, 0.5, size=(count, 1))
        h = rng.uniform(0.4, 0.6, size=(count, 1))
        gap = 1.0 - np.sum(q * q, axis=-1, keepdims=True)
        p = _unit_vectors(rng, count, self.n) * np.sqrt(8.0 * h) / gap
        return self.join(q, p)
