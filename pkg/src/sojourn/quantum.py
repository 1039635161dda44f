"""Truncated shift system: the expectation-value flow of Delta = (U + U*)/2.

U is the unilateral shift on C^D, N = diag(0, ..., D-1) - c a number
operator (U N U* = N - 1 away from the edges), S = (U - U*)/2i and
A = (SN + NS)/2. With psi_t = exp(-i t Delta) psi the identity
i[A, Delta] = Delta^2 - 1 gives d<A>/dt = <1 - Delta^2>, so Phi = <A> is
linear along the flow until the state reaches the truncation edges.

States psi are encoded as canonical coordinates z = sqrt(2) (Re psi, Im psi),
for which H(z) = <psi, Delta psi> generates the Schroedinger flow.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, eigh
from scipy.optimize import brentq

from .dynamics.system import HamiltonianSystem
from .engine import EXIT_MARGIN, converge
from .errors import DomainError, NumericError, WindowTooSmallError
from .locfn.functions import LocalisationFunction, characteristic_ball
from .models import QuantumReport, RadiiSchedule, SojournSeries, Tolerances

NORM_TOL = 1e-10
LEAKAGE_TOL = 1e-6
QUANTUM_CRITICAL_EPS = 1e-4


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def support(self, threshold: float = 1e-12) -> Tuple[int, int]:
        """Smallest index interval outside which every |psi_k|^2 is below ``threshold``."""
        idx = np.flatnonzero(np.abs(self.amplitudes) ** 2 >= threshold)
        if idx.size == 0:
            return 0, -1
        return int(idx[0]), int(idx[-1])


StateLike = Union[StateVector, np.ndarray, Sequence[complex]]


def _amplitudes(psi: StateLike) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)


@dataclass(frozen=True)
class QuantumSystem:
    dim: int
    margin: int
    offset: float
    U: np.ndarray
    N: np.ndarray
    Delta: np.ndarray
    S: np.ndarray
    A: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def interior(self) -> Tuple[int, int]:
        return self.margin, self.dim - 1 - self.margin


def shift_operators(dim: int, offset: float = 0.0):
    """(U, N, Delta, S, A) on C^dim, without validation."""
    U = np.eye(dim, k=-1)
    N = np.diag(np.arange(dim, dtype=float) - offset)
    Delta = 0.5 * (U + U.T)
    S = (U - U.T) / 2j
    A = 0.5 * (S @ N + N @ S)
    return U, N, Delta, S, A


def centred_offset(dim: int) -> float:
    """Offset placing the zero of N four sites below the packet centre dim/2.

    <A> of the default packet is then O(1) rather than O(dim).
    """
    return dim / 2 - 4


def commutation_residual(qs: QuantumSystem) -> float:
    """max_k ||(i[A, Delta] - (Delta^2 - I)) e_k|| over interior k."""
    lhs = 1j * (qs.A @ qs.Delta - qs.Delta @ qs.A)
    rhs = qs.Delta @ qs.Delta - np.eye(qs.dim)
    lo, hi = qs.interior
    return float(np.max(np.linalg.norm((lhs - rhs)[:, lo: hi + 1], axis=0)))


def build_shift_system(dim: int, margin: int, offset: float = 0.0) -> QuantumSystem:
    """Operators on C^dim with N = diag(0, ..., dim-1) - offset, checked on the interior band."""
    if dim < 16:
        raise DomainError(f"dim must be >= 16, got {dim}")
    if not 1 <= margin < dim / 4:
        raise DomainError(f"margin must satisfy 1 <= b < dim/4, got {margin}")
    offset = float(offset)
    U, N, Delta, S, A = shift_operators(dim, offset)
    try:
        eigenvalues, eigenvectors = eigh(Delta)
    except LinAlgError as exc:
        raise NumericError(f"eigendecomposition of Delta failed: {exc}", {"dim": dim}) from exc
    qs = QuantumSystem(dim, margin, offset, U, N, Delta, S, A, eigenvalues, eigenvectors)

    for label, m in (("Delta", Delta), ("S", S), ("A", A)):
        gap = float(np.max(np.abs(m - m.conj().T)))
        if gap > 1e-13:
            raise NumericError(f"{label} is not self-adjoint (gap {gap:.2e})")
    if np.max(np.abs(eigenvalues)) > 1.0 + 1e-13:
        raise NumericError("spectrum of Delta leaves [-1, 1]", {"max": float(np.max(np.abs(eigenvalues)))})
    lo, hi = qs.interior
    number = U @ N @ U.T - N + np.eye(dim)
    if float(np.max(np.abs(number[:, lo: hi + 1]))) > 1e-13:
        raise NumericError("U N U* = N - 1 fails on the interior")
    logger.debug(f"shift system D={dim} b={margin} c={offset:g}: residual {commutation_residual(qs):.2e}")
    return qs


def _check_normalised(psi: np.ndarray) -> None:
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORM_TOL:
        raise DomainError(f"state must have unit norm, got {norm:.12g}")


def expectation(matrix: np.ndarray, psi: StateLike) -> float:
    """<psi, M psi> for self-adjoint M."""
    psi = _amplitudes(psi)
    _check_normalised(psi)
    value = complex(np.vdot(psi, matrix @ psi))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise NumericError("expectation has an imaginary part; is the matrix self-adjoint?",
                           {"imag": value.imag})
    return value.real


def evolve_many(qs: QuantumSystem, psi: StateLike, times) -> np.ndarray:
    """exp(-i t Delta) psi for each t, shape ``(len(times), dim)``."""
    psi = _amplitudes(psi)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    coeffs = qs.eigenvectors.T @ psi
    phases = np.exp(-1j * np.outer(times, qs.eigenvalues))
    return (phases * coeffs) @ qs.eigenvectors.T


def evolve(qs: QuantumSystem, psi: StateLike, t: float) -> StateVector:
    _check_normalised(_amplitudes(psi))
    return StateVector(evolve_many(qs, psi, [t])[0])


def gaussian_packet(dim: int, center: Optional[float] = None, width: Optional[float] = None,
                    kappa: float = math.pi / 2) -> StateVector:
    """psi_k ~ exp(-(k - center)^2 / 4 width^2) exp(i kappa k), normalised."""
    center = dim / 2 if center is None else float(center)
    width = dim / 16 if width is None else float(width)
    k = np.arange(dim, dtype=float)
    psi = np.exp(-((k - center) ** 2) / (4.0 * width ** 2) + 1j * kappa * k)
    return StateVector(psi / np.linalg.norm(psi))


def leakage(qs: QuantumSystem, psi) -> np.ndarray:
    """Mass outside the interior band, for one state or a stack of states."""
    probs = np.abs(np.atleast_2d(_amplitudes(psi))) ** 2
    lo, hi = qs.interior
    return probs[:, :lo].sum(axis=1) + probs[:, hi + 1:].sum(axis=1)


def certified_window(qs: QuantumSystem, psi: StateLike, tol: float = LEAKAGE_TOL,
                     step: float = 0.25, horizon: Optional[float] = None) -> float:
    """Largest T such that leakage(evolve(psi, t)) <= tol for all |t| <= T (on a grid of ``step``)."""
    psi = _amplitudes(psi)
    if leakage(qs, psi)[0] > tol:
        return 0.0
    horizon = float(qs.dim) if horizon is None else horizon
    times = np.arange(step, horizon + step, step)
    for chunk in np.array_split(times, max(1, times.size // 256)):
        leak = np.maximum(leakage(qs, evolve_many(qs, psi, chunk)), leakage(qs, evolve_many(qs, psi, -chunk)))
        bad = np.flatnonzero(leak > tol)
        if bad.size:
            return float(chunk[bad[0]] - step)
    return float(times[-1])


class ExpectationSystem(HamiltonianSystem):
    """H(psi) = <Delta>, Phi(psi) = <A> on the unit sphere of C^D, in canonical coordinates."""

    name = "shift_expectation"
    anchor = "quantum: expectation values of the truncated shift system"
    domain_description = "|psi| = 1"

    def __init__(self, qs: QuantumSystem):
        super().__init__(qs.dim, 1)
        self.qs = qs
        self._gap = np.eye(qs.dim) - qs.Delta @ qs.Delta

    @property
    def refine_crossings(self) -> bool:
        return True

    @staticmethod
    def encode(psi: StateLike) -> np.ndarray:
        psi = _amplitudes(psi)
        return math.sqrt(2.0) * np.concatenate([psi.real, psi.imag], axis=-1)

    def decode(self, z) -> np.ndarray:
        x, y = self.split(z)
        return (x + 1j * y) / math.sqrt(2.0)

    def _expect(self, matrix, z):
        psi = self.decode(z)
        return np.real(np.sum(psi.conj() * (psi @ matrix.T), axis=-1))

    def in_domain(self, z) -> bool:
        return super().in_domain(z) and abs(float(np.linalg.norm(self.decode(z))) - 1.0) <= NORM_TOL

    def hamiltonian(self, z):
        return self._expect(self.qs.Delta, z)

    def phi(self, z):
        return self._expect(self.qs.A, z)[..., None]

    def partials(self, z):
        x, y = self.split(z)
        return x @ self.qs.Delta.T, y @ self.qs.Delta.T

    def nabla_h_closed(self, z):
        return np.array([float(self._expect(self._gap, z))])

    def sample(self, rng, count):
        dim = self.qs.dim
        return np.array([self.encode(gaussian_packet(dim, dim / 2 + rng.uniform(-2, 2), dim / 16,
                                                     rng.uniform(1.2, 1.9)))
                         for _ in range(count)])

    def exact_flow(self, t, z):
        return self.encode(evolve_many(self.qs, self.decode(z), t))


def gradient_gap(qs: QuantumSystem, psi: StateLike) -> float:
    """<1 - Delta^2>(psi), the component of grad H."""
    return expectation(np.eye(qs.dim) - qs.Delta @ qs.Delta, psi)


def is_critical_state(qs: QuantumSystem, psi: StateLike, eps: float = QUANTUM_CRITICAL_EPS) -> bool:
    return abs(gradient_gap(qs, psi)) < eps


def vector_field_norm(qs: QuantumSystem, psi: StateLike) -> float:
    """|X_H(psi)| = |Delta psi|; zero only at psi = 0 when Delta has no kernel."""
    return float(np.linalg.norm(qs.Delta @ _amplitudes(psi)))


def expectation_slope(qs: QuantumSystem, psi: StateLike, half_width: float = 5.0, samples: int = 41) -> float:
    """Least-squares slope of <A>(evolve(psi, t)) over |t| <= half_width."""
    times = np.linspace(-half_width, half_width, samples)
    states = evolve_many(qs, psi, times)
    values = np.real(np.sum(states.conj() * (states @ qs.A.T), axis=-1))
    return float(np.polyfit(times, values, 1)[0])


def max_usable_radius(f: LocalisationFunction, phi: float, grad: float, window: float, tail_tol: float) -> float:
    """Largest r whose truncation time fits inside ``window``."""
    x, y = np.array([phi]), np.array([grad])
    margin = 1.0 if f.is_smooth else EXIT_MARGIN

    def excess(r):
        return margin * f.truncation_time(x, y, r, tail_tol) - window

    hi = window * abs(grad)
    if hi <= 0 or excess(1e-12) > 0:
        return 0.0
    if excess(hi) <= 0:
        return hi
    return float(brentq(excess, 1e-12, hi, xtol=1e-9))


def quantum_sojourn(qs: QuantumSystem, f: LocalisationFunction, psi: StateLike,
                    radii: Union[RadiiSchedule, Sequence[float]], *,
                    tolerances: Tolerances = Tolerances(acceptance=0.05, critical_eps=QUANTUM_CRITICAL_EPS),
                    leakage_tol: float = LEAKAGE_TOL) -> SojournSeries:
    """Sojourn series along exp(-i t Delta) psi against T_f = <A> / <1 - Delta^2> (radial f)."""
    if f.dimension != 1:
        raise DomainError("the quantum sojourn needs f on R^1")
    psi = _amplitudes(psi)
    _check_normalised(psi)
    system = ExpectationSystem(qs)
    z = system.encode(psi)
    grad = float(system.nabla_h_closed(z)[0])
    if abs(grad) < tolerances.critical_eps:
        raise DomainError(f"state is critical: <1 - Delta^2> = {grad:.3e}")
    phi = float(system.phi(z)[0])
    window = certified_window(qs, psi, leakage_tol)
    values = radii.values() if isinstance(radii, RadiiSchedule) else [float(r) for r in radii]
    r_max = max_usable_radius(f, phi, grad, window, tolerances.tail)
    if max(values) > r_max:
        raise WindowTooSmallError(
            f"radius {max(values):g} needs more than the certified window {window:g}; "
            f"largest usable radius is {r_max:.4g}", max_usable_radius=r_max,
            diagnostics={"window": window, "phi": phi, "grad": grad})
    return converge(system, f, z, values, tolerances=tolerances)


def verify_quantum(dim: int = 512, margin: int = 32, *, width: Optional[float] = None,
                   kappa: float = math.pi / 2, offset: Optional[float] = None,
                   radii: Optional[Sequence[float]] = None,
                   f: Optional[LocalisationFunction] = None) -> QuantumReport:
    """Full quantum check for a centred Gaussian packet.

    ``offset=None`` uses ``centred_offset(dim)``; pass 0 for N = diag(0, ..., dim-1).
    """
    offset = centred_offset(dim) if offset is None else offset
    qs = build_shift_system(dim, margin, offset)
    psi = gaussian_packet(dim, width=width, kappa=kappa)
    f = f or characteristic_ball(1)
    a = expectation(qs.A, psi)
    gap = gradient_gap(qs, psi)
    slope = expectation_slope(qs, psi)
    window = certified_window(qs, psi)
    tolerances = Tolerances(acceptance=0.05, critical_eps=QUANTUM_CRITICAL_EPS)
    critical = abs(gap) < tolerances.critical_eps
    r_max = 0.0 if critical else max_usable_radius(f, a, gap, window, tolerances.tail)
    series = None
    if not critical:
        series = quantum_sojourn(qs, f, psi, radii or [5.0, 10.0, 20.0, 40.0], tolerances=tolerances)
    return QuantumReport(
        dim=dim,
        margin=margin,
        expectation_A=a,
        expectation_gap=gap,
        reference=a / gap if not critical else float("nan"),
        slope=slope,
        slope_relative_error=abs(slope - gap) / max(abs(gap), 1e-300),
        commutation_residual=commutation_residual(qs),
        certified_window=window,
        max_usable_radius=r_max,
        series=series,
        critical=critical,
    )
