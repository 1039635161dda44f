"""Elliptic integrals of the first kind, complete and incomplete, through Carlson's R_F for all real amplitudes."""
import numpy as np
from scipy.special import elliprf

from ..errors import DomainError


def _check_modulus(k):
    k = np.asarray(k, dtype=float)
    if not np.all(np.abs(k) < 1.0):
        raise DomainError(f"elliptic modulus must satisfy |k| < 1, got {np.max(np.abs(k))}")
    return k


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def complete_K(k):
    k = _check_modulus(k)
    return _scalar(elliprf(0.0, 1.0 - k * k, 1.0))


def elliptic_F(phi, k):
    """Incomplete elliptic integral of the first kind, F(phi|k) with modulus k.

    Evaluated with Carlson's R_F (duplication algorithm) on the principal
    branch |phi| <= pi/2 and extended to all real phi through
    F(phi + pi|k) = F(phi|k) + 2 K(k), so that the result is continuous and
    increasing in phi. ``phi`` and ``k`` broadcast.
    """
    k = _check_modulus(k)
    phi = np.asarray(phi, dtype=float)
    turns = np.round(phi / np.pi)
    reduced = phi - turns * np.pi
    s, c = np.sin(reduced), np.cos(reduced)
    principal = s * elliprf(c * c, 1.0 - k * k * s * s, 1.0)
    return _scalar(principal + 2.0 * turns * elliprf(0.0, 1.0 - k * k, 1.0))
