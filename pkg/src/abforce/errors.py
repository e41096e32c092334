"""Exception hierarchy.

Every error raised by the library derives from :class:`AbforceError`, and
each subclass carries the CLI exit code it maps to.
"""


class AbforceError(Exception):
    exit_code = 1


class ConfigError(AbforceError):
    """Malformed or invalid run configuration."""

    exit_code = 2

    def __init__(self, message, key=None, line=None, column=None):
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column


class RegimeError(AbforceError, ValueError):
    """Scenario outside the slow-electron / perturbative regime."""

    exit_code = 4


class ScaleRangeError(AbforceError, ArithmeticError):
    """A dimensionless group over- or underflows double range."""

    exit_code = 4


class SingularPointError(AbforceError, ZeroDivisionError):
    """Field requested at the source point."""

    exit_code = 3


class NumericalError(AbforceError, ArithmeticError):
    exit_code = 3


class QuadratureError(NumericalError):
    """Adaptive quadrature failed to meet its tolerance."""


class StepSizeError(NumericalError):
    """Finite-difference step too small for the function's noise level."""


class IntegrationError(NumericalError):
    """ODE integration failed (step underflow or step budget exhausted)."""


class UnderResolvedError(NumericalError):
    """Sampled pattern too coarse to locate a fringe."""
