"""Phase-space points and the Hamiltonian-system base class.

Points are coordinate vectors ``z = (q, p)`` of length ``2n`` in the system's
chart; every array-valued method is vectorised over leading axes.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from ..errors import DomainError
from ..numerics.integrators import ExactOrbit, Orbit, adaptive_orbit, splitting_orbit


class FlowKind(str, Enum):
    exact = "exact"
    splitting = "splitting"
    adaptive = "adaptive"


@dataclass(frozen=True)
class PhasePoint:
    coords: np.ndarray
    chart: str = "canonical"
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))


@dataclass(frozen=True)
class Observable:
    """A phase-space function with an optional analytic gradient.

    ``gradient`` returns the partial derivatives in Darboux coordinates,
    ``(d/dQ, d/dP)`` concatenated.
    """
    value: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, z):
        return self.value(z)


class HamiltonianSystem:
    """Base class: H, Phi, domain, flow and optional closed forms.

    Subclasses implement ``hamiltonian``, ``phi``, ``partials`` and either
    ``exact_flow`` (``flow_kind = exact``) or rely on ``vector_field``
    (``adaptive``) / ``kinetic_gradient`` + ``potential_gradient``
    (``splitting``, separable H only).
    """

    name = "system"
    anchor = ""
    chart = "canonical"
    flow_kind = FlowKind.exact
    domain_description = "z in R^2n"

    def __init__(self, n: int, d: int, drift_budget: float = 1e-10):
        self.n = int(n)
        self.d = int(d)
        self.drift_budget = float(drift_budget)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, d={self.d})"

    # Split helpers

    def split(self, z) -> Tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z, dtype=float)
        return z[..., : self.n], z[..., self.n:]

    @staticmethod
    def join(q, p) -> np.ndarray:
        return np.concatenate([q, p], axis=-1)

    # Functions on phase space

    def hamiltonian(self, z):
        raise NotImplementedError

    def phi(self, z):
        raise NotImplementedError

    def partials(self, z) -> Tuple[np.ndarray, np.ndarray]:
        """Analytic (dH/dq, dH/dp)."""
        raise NotImplementedError

    def nabla_h_closed(self, z) -> Optional[np.ndarray]:
        """Closed-form grad H = ({Phi_j, H})_j where one is known."""
        return None

    def gradient_law(self, h) -> Optional[float]:
        """g with grad H = g(H), for systems of that family."""
        return None

    @property
    def refine_crossings(self) -> bool:
        """Whether Phi can deviate from its linear prediction along computed orbits."""
        return self.flow_kind is not FlowKind.exact

    def first_integrals(self, z) -> Optional[np.ndarray]:
        """Conserved quantities besides H, watched by the numeric integrators."""
        return None

    def in_domain(self, z) -> bool:
        return bool(np.all(np.isfinite(np.asarray(z, dtype=float))))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random non-critical domain points, shape ``(count, 2n)``."""
        raise NotImplementedError

    def to_darboux(self, z) -> np.ndarray:
        return np.asarray(z, dtype=float)

    def from_darboux(self, w) -> np.ndarray:
        return np.asarray(w, dtype=float)

    # Observables

    @property
    def H(self) -> Observable:
        def grad(z):
            dq, dp = self.partials(z)
            return np.concatenate([dq, dp], axis=-1)

        analytic = grad if self.chart == "canonical" else None
        return Observable(self.hamiltonian, analytic, "H")

    def Phi_component(self, j: int) -> Observable:
        return Observable(lambda z: self.phi(z)[..., j], None, f"Phi_{j}")

    # Points and flows

    def require(self, z) -> np.ndarray:
        if isinstance(z, PhasePoint):
            if z.chart != self.chart:
                raise DomainError(f"{self.name}: point given in chart {z.chart!r}, expected {self.chart!r}")
            z = z.coords
        z = np.asarray(z, dtype=float)
        if z.shape != (2 * self.n,):
            raise DomainError(f"{self.name}: expected {2 * self.n} coordinates, got shape {z.shape}")
        if not self.in_domain(z):
            raise DomainError(f"{self.name}: point {z.tolist()} violates the domain predicate "
                              f"({self.domain_description})")
        return z

    def point(self, coords, point_id: str = "") -> PhasePoint:
        return PhasePoint(self.require(coords), self.chart, point_id)

    def vector_field(self, z) -> np.ndarray:
        dq, dp = self.partials(z)
        if self.chart != "canonical":
            raise NotImplementedError(f"{self.name}: no vector field outside canonical charts")
        return np.concatenate([dp, -dq], axis=-1)

    def exact_flow(self, t: np.ndarray, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def kinetic_gradient(self, p):
        raise NotImplementedError

    def potential_gradient(self, q):
        raise NotImplementedError

    def orbit(self, z, t_max: float) -> Orbit:
        z = self.require(z)
        if self.flow_kind is FlowKind.exact:
            return ExactOrbit(self.exact_flow, z)
        t_max = max(float(t_max), 1.0)
        if not math.isfinite(t_max):
            raise DomainError(f"{self.name}: numeric orbits need a finite window")
        if self.flow_kind is FlowKind.splitting:
            return splitting_orbit(self, z, t_max, drift_budget=self.drift_budget)
        return adaptive_orbit(self, z, t_max, drift_budget=self.drift_budget)

    def flow(self, t: float, z) -> np.ndarray:
        z = self.require(z)
        if self.flow_kind is FlowKind.exact:
            return self.exact_flow(np.atleast_1d(float(t)), z)[0]
        return self.orbit(z, abs(float(t)))(np.atleast_1d(float(t)))[0]
