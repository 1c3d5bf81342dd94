"""Exception types shared across the package.

The CLI maps these onto distinct process exit codes (see cli.EXIT_*), so
solver and I/O code should raise the most specific type that applies.
"""


class GelFemError(Exception):
    """Base class for all errors raised by this package."""


class ParameterDomainError(GelFemError, ValueError):
    """Material or model parameters outside the admissible domain
    (e.g. no swelling root in the search bracket)."""


class AdmissibilityError(GelFemError, ValueError):
    """Deformation state outside the domain of the free energy: the total
    swelling ratio dropped to (or below) the dry-network volume, where the
    mixing term is singular."""


class InvertedElementError(GelFemError, ValueError):
    """Non-positive reference Jacobian at a quadrature point."""


class SingularSystemError(GelFemError, RuntimeError):
    """Global tangent is singular, typically from missing rigid-body
    constraints."""


class ConvergenceError(GelFemError, RuntimeError):
    """Newton iteration or continuation stepping failed to converge."""


class ModelParseError(GelFemError, ValueError):
    """Model file could not be parsed into a valid model."""
