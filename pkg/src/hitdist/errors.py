"""Exception types raised by the hitdist package."""

from __future__ import annotations


class HitDistError(Exception):
    """Base class for all errors raised by this package."""


class SurfaceFormatError(HitDistError):
    """A surface file or string could not be parsed.

    Carries the 1-based line number where parsing failed, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SurfaceShapeError(HitDistError):
    """A parsed surface violates a shape constraint.

    The message names the violated condition and the offending column.
    """


class QuadratureError(HitDistError):
    """A kernel integral failed to converge within the refinement budget."""

    def __init__(self, level: int, offset: int, estimate: float, message: str = ""):
        self.level = level
        self.offset = offset
        self.estimate = estimate
        detail = message or (
            f"integral at level {level}, offset {offset} did not converge; "
            f"last estimate {estimate!r}"
        )
        super().__init__(detail)


class SystemSolveError(HitDistError):
    """The boundary linear system could not be solved reliably.

    Raised on a singular or numerically unacceptable factorization; the
    message names the surface digest so the failing input can be identified.
    """
