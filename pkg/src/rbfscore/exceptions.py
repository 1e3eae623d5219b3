"""Error types raised by the detection pipeline.

Every error carries a ``stage`` attribute naming the pipeline step that
failed, so that command-line front ends can report it and choose an exit
code without parsing messages.
"""


class RbfScoreError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class InputError(RbfScoreError, ValueError):
    """Invalid user input: bad files, bad arguments, infeasible configs."""


class ParseError(InputError):
    """A text input could not be parsed.

    Attributes
    ----------
    line : int or None
        1-based line number of the offending line, when known.
    """

    def __init__(self, message, line=None, stage="parse"):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, stage=stage)
        self.line = line


class NumericalError(RbfScoreError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class SingularMatrixError(NumericalError):
    """A linear system is singular to working precision."""


class ConvergenceError(NumericalError):
    """An iterative routine hit its iteration cap.

    Attributes
    ----------
    estimate : float or None
        The last estimate produced before giving up.
    """

    def __init__(self, message, estimate=None, stage=None):
        super().__init__(message, stage=stage)
        self.estimate = estimate


class KatzDivergenceError(NumericalError):
    """The Katz walk series does not converge for the requested decay."""
