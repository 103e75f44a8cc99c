"""Exception types shared across the package."""


class KilError(Exception):
    """Base class for all errors raised by this package."""


class AssumptionViolationError(KilError):
    """A hypothesis on the frequency density (evenness, unimodality, decay,
    sign conditions on derived quantities) does not hold numerically."""


class OutOfStripError(KilError):
    """A complex argument lies outside the strip of analyticity Re > -a."""


class ConvergenceError(KilError):
    """An iterative solver failed to converge; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class NoPositiveEigenvalueError(KilError):
    """The kernel spectrum has no positive top eigenvalue."""


class UnsupportedEigenfunctionError(KilError):
    """Eigenfunction shape outside the constant / single-Fourier-mode cases."""


class FitError(KilError):
    """Not enough usable data to fit a bifurcation point."""


class DivergenceError(KilError):
    """The time integration produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConfigError(KilError):
    """Invalid or malformed experiment configuration."""
