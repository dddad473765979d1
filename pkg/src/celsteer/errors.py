class CelsteerError(Exception):
    """Base class for all package errors."""


class ConfigError(CelsteerError, ValueError):
    """Invalid or inconsistent input parameters."""


class NearSingularError(CelsteerError, ArithmeticError):
    """A denominator in the steady-state cavity amplitude is numerically zero."""


class UnstableError(CelsteerError):
    """The drift matrix has an eigenvalue with non-negative real part.

    No steady state exists; this is a physical verdict, not a numerical failure.
    """

    def __init__(self, max_real_eig, message=None):
        self.max_real_eig = max_real_eig
        super().__init__(message or f"drift matrix unstable (max Re eig = {max_real_eig:.6g})")


class NumericalError(CelsteerError, ArithmeticError):
    """A linear-algebra routine failed to converge or produced garbage."""


class NotPositiveSemidefinite(CelsteerError, ValueError):
    """The diffusion matrix has a significantly negative eigenvalue."""

    def __init__(self, min_eig, message=None):
        self.min_eig = min_eig
        super().__init__(message or f"matrix not positive semidefinite (min eig = {min_eig:.6g})")


class NonPositiveDeterminant(CelsteerError, ValueError):
    """A covariance block that must be positive definite is not."""


class SimulationDiverged(CelsteerError, RuntimeError):
    """A Monte Carlo trajectory blew up."""
