class ParafeynError(Exception):
    """Base class for all errors raised by the package."""


class GraphValidationError(ParafeynError, ValueError):
    """Malformed graph, subgraph or input file."""


class KinematicsError(ParafeynError, ValueError):
    """Malformed or incomplete kinematic data."""


class DivergenceError(ParafeynError):
    """A mathematically meaningful refusal: divergent or non-logarithmic input.

    ``offenders`` lists ``(sorted edge ids, superficial degree)`` pairs.
    """

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = list(offenders)


class ScaleGuardError(ParafeynError, ValueError):
    """Requested enumeration exceeds the configured desk-scale limits."""


class IntegrationError(ParafeynError):
    """Non-finite integrand values or quadrature that failed to converge."""
