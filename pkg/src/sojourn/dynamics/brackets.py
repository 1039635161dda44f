import numpy as np

from ..errors import NumericError
from .system import HamiltonianSystem, Observable

_STENCIL = ((-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0))


def _as_observable(fct) -> Observable:
    return fct if isinstance(fct, Observable) else Observable(fct)


def fd_gradient(sys: HamiltonianSystem, fct, z: np.ndarray) -> np.ndarray:
    """4th-order central differences in Darboux coordinates.

    Step ``h_i = 1e-5 * (1 + |w_i|)``.
    """
    w = sys.to_darboux(z)
    grad = np.empty_like(w)
    for i in range(w.size):
        h = 1e-5 * (1.0 + abs(w[i]))
        if (w[i] + h) - w[i] == 0.0:
            raise NumericError("finite-difference step underflow", {"index": i, "coordinate": float(w[i])})
        acc = 0.0
        for k, c in _STENCIL:
            shifted = w.copy()
            shifted[i] += k * h
            acc += c * float(fct(sys.from_darboux(shifted)))
        grad[i] = acc / (12.0 * h)
    if not np.all(np.isfinite(grad)):
        raise NumericError("non-finite finite-difference gradient", {"z": np.asarray(z).tolist()})
    return grad


def gradient(sys: HamiltonianSystem, fct, z: np.ndarray) -> np.ndarray:
    obs = _as_observable(fct)
    if obs.gradient is not None:
        return np.asarray(obs.gradient(z), dtype=float)
    return fd_gradient(sys, obs.value, z)


def poisson_bracket(sys: HamiltonianSystem, fct_a, fct_b, m) -> float:
    """Canonical bracket sum_j (d_Q a d_P b - d_P a d_Q b) at m, in Darboux coordinates."""
    z = sys.require(m)
    ga = gradient(sys, fct_a, z)
    gb = gradient(sys, fct_b, z)
    n = sys.n
    return float(ga[:n] @ gb[n:] - ga[n:] @ gb[:n])


def nabla_H(sys: HamiltonianSystem, m, method: str = "auto") -> np.ndarray:
    """Components {Phi_j, H}(m); the closed form is used when available and ``method="auto"``."""
    z = sys.require(m)
    if method == "auto":
        closed = sys.nabla_h_closed(z)
        if closed is not None:
            return np.atleast_1d(np.asarray(closed, dtype=float))
    gh = gradient(sys, sys.H, z)
    return np.array([poisson_bracket(sys, sys.Phi_component(j), Observable(sys.hamiltonian, lambda _z, g=gh: g), z)
                     for j in range(sys.d)])


def is_critical(sys: HamiltonianSystem, m, eps: float = 1e-8) -> bool:
    return bool(np.linalg.norm(nabla_H(sys, m)) < eps)
