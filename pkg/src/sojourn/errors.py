from typing import Any, Dict, Optional


class SojournError(Exception):
    """Base class for every error raised by the library."""


class DomainError(SojournError, ValueError):
    """Input outside the domain of an operation (x = 0, critical point, k >= 1, ...)."""


class ConfigError(SojournError, ValueError):
    """Invalid run configuration."""


class UnsupportedFunctionError(SojournError, TypeError):
    """The localisation function lacks the regularity an operation needs."""


class NumericError(SojournError, ArithmeticError):
    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class FlowError(NumericError):
    """Integrator divergence or exhausted drift budget."""

    def __init__(self, message: str, reached_time: float, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)
        self.reached_time = reached_time


class WindowTooSmallError(NumericError):
    """Truncated quantum evolution leaks out of the interior band before t*."""

    def __init__(self, message: str, max_usable_radius: float, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message, diagnostics)
        self.max_usable_radius = max_usable_radius
