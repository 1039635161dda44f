"""Periodic flows lifted to a covering chart where Phi can grow without bound."""
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..dynamics.system import HamiltonianSystem


class SphereParams(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SphereCovering(HamiltonianSystem):
    """Rotations of S^2 about the z-axis, lifted to the strip (theta, z) in R x (-1, 1).

    theta and z are Darboux coordinates for the area form; H = z, Phi = theta.
    """

    name = "sphere_covering"
    anchor = "covering: rotations of the sphere about an axis"
    chart = "cylinder"
    domain_description = "-1 < z < 1"

    def __init__(self, drift_budget: float = 1e-10):
        super().__init__(1, 1, drift_budget)

    @classmethod
    def from_params(cls, params: SphereParams, drift_budget: float) -> "SphereCovering":
        return cls(drift_budget)

    def in_domain(self, z) -> bool:
        return super().in_domain(z) and bool(abs(np.asarray(z, dtype=float)[1]) < 1.0)

    def hamiltonian(self, z):
        return np.asarray(z, dtype=float)[..., 1].copy()

    def phi(self, z):
        return np.asarray(z, dtype=float)[..., :1].copy()

    def nabla_h_closed(self, z):
        return np.ones(1)

    def gradient_law(self, h):
        return 1.0

    def sample(self, rng, count):
        return np.stack([rng.uniform(-10.0, 10.0, size=count), rng.uniform(-0.9, 0.9, size=count)], axis=-1)

    def exact_flow(self, t, z):
        t = np.asarray(t, dtype=float)
        out = np.tile(np.asarray(z, dtype=float), (t.size, 1))
        out[:, 0] += t
        return out

    def project(self, z) -> np.ndarray:
        """Covering map to the unit sphere in R^3."""
        z = np.asarray(z, dtype=float)
        theta, height = z[..., 0], z[..., 1]
        rho = np.sqrt(1.0 - height ** 2)
        return np.stack([rho * np.cos(theta), rho * np.sin(theta), height], axis=-1)


class OscillatorParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(1, ge=1)
    K: float = Field(1.0, gt=0)


class OscillatorCovering(HamiltonianSystem):
    """Isotropic oscillator in polar coordinates (r_j, theta_j), r_j > 0, theta_j in R.

    H = |r|^2 / 2, Phi = theta, flow (r, theta - K t). Darboux coordinates are
    Q_j = r_j^2 / 2K, P_j = theta_j, so H = K sum_j Q_j and grad H_j = -K.
    """

    name = "oscillator_covering"
    anchor = "covering: harmonic oscillator in angle coordinates"
    chart = "polar"
    domain_description = "r_j > 0 for every j"

    def __init__(self, n: int = 1, K: float = 1.0, drift_budget: float = 1e-10):
        super().__init__(n, n, drift_budget)
        self.K = float(K)

    @classmethod
    def from_params(cls, params: OscillatorParams, drift_budget: float) -> "OscillatorCovering":
        return cls(params.n, params.K, drift_budget)

    def in_domain(self, z) -> bool:
        r, _ = self.split(z)
        return super().in_domain(z) and bool(np.all(r > 0))

    def hamiltonian(self, z):
        r, _ = self.split(z)
        return 0.5 * np.sum(r * r, axis=-1)

    def phi(self, z):
        _, theta = self.split(z)
        return theta.copy()

    def to_darboux(self, z):
        r, theta = self.split(z)
        return self.join(r * r / (2.0 * self.K), theta)

    def from_darboux(self, w):
        big_q, theta = self.split(w)
        return self.join(np.sqrt(2.0 * self.K * big_q), theta)

    def nabla_h_closed(self, z):
        return np.full(self.d, -self.K)

    def sample(self, rng, count):
        r = rng.uniform(0.5, 2.0, size=(count, self.n))
        return self.join(r, rng.uniform(-10.0, 10.0, size=(count, self.n)))

    def exact_flow(self, t, z):
        r, theta = self.split(z)
        t = np.asarray(t, dtype=float)[:, None]
        thetas = theta - self.K * t
        return self.join(np.broadcast_to(r, thetas.shape), thetas)

    def project(self, z) -> np.ndarray:
        """Covering map to R^2n, as (x_1, y_1, ..., x_n, y_n)."""
        r, theta = self.split(z)
        xy = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        return xy.reshape(xy.shape[:-2] + (2 * self.n,))
