class GptError(Exception):
    """Base class for numerical failures in this package."""


class SingularSystemError(GptError):
    """A linear system that must be solved is singular or too ill-conditioned."""


class ConvergenceError(GptError):
    """The fixed-point iteration for the contrast did not converge."""

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = list(trace or [])


class DataError(GptError):
    """Measured GPTs are inconsistent with any admissible inclusion."""
