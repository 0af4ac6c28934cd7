"""
Error types for the mooncat package.

This module defines one exception per documented failure condition:
- Dimension and truncation problems of the truncated Fock space
- Numerical failures (stiff integration, eigen-solver, fits)
- Invalid model parameters and out-of-range error models
- Configuration errors raised while building a run

Every error carries the process exit code the CLI reports for it.
"""


class MoonCatError(Exception):
    """Base class for all mooncat errors."""

    exit_code = 1


class ConfigError(MoonCatError, ValueError):
    """Malformed or out-of-range run configuration."""

    exit_code = 2

    def __init__(self, message: str, key: str = ""):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class InvalidDimensionError(MoonCatError, ValueError):
    """Fock-space dimension below the minimum of 2."""

    exit_code = 2


class TruncationError(MoonCatError, ValueError):
    """Truncation too small for the requested state or model."""

    exit_code = 3


class StiffnessError(MoonCatError, RuntimeError):
    """Adaptive integrator could not control its step size."""

    exit_code = 4


class EigenSolverError(MoonCatError, RuntimeError):
    """Liouvillian eigenproblem did not converge."""

    exit_code = 4


class FitFailedError(MoonCatError, RuntimeError):
    """Least-squares fit did not converge.

    Attributes:
        last_iterate: Parameter vector of the last iterate
    """

    exit_code = 4

    def __init__(self, message: str, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InvalidParameterError(MoonCatError, ValueError):
    """Model parameters outside the model's domain."""

    exit_code = 2


class PosteriorUnderflowError(MoonCatError, RuntimeError):
    """Posterior vanished everywhere on the grid."""

    exit_code = 4


class ModelOutOfRangeError(MoonCatError, ValueError):
    """Error probabilities outside [0, 0.5]."""

    exit_code = 5


class WidenGridError(MoonCatError, ValueError):
    """Optimum found on the boundary of the search grid."""

    exit_code = 5


# Exit code reported when a run finishes with flagged (partial) results
EXIT_FLAGGED = 6
