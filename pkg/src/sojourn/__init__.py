"""Sojourn-time differences of Hamiltonian orbits and the time observable T_f."""

__version__ = "0.1.0"
