"""
Errors
======

Exception hierarchy shared by every hopfring module. The CLI maps these to
exit codes; library code only raises.
"""

from typing import Optional


class HopfRingError(ValueError):
    """Base class for all hopfring errors."""


class PrimeError(HopfRingError):
    """The requested characteristic is not an odd prime."""


class RankMismatchError(HopfRingError):
    """Operands disagree on rank, prime or loop-space level."""


class SingularMatrixError(HopfRingError):
    """A matrix expected to lie in GL_n has zero determinant."""


class DivisionError(HopfRingError):
    """Exact division left a remainder, or a shift went below exponent zero."""


class StringError(HopfRingError):
    """An index string is outside the domain of the requested operation."""


class TruncationOverflow(HopfRingError):
    """Engine work needs a degree beyond the configured budget."""

    def __init__(self, degree: int, bound: int, what: str = ""):
        self.degree = degree
        self.bound = bound
        self.what = what
        detail = f" while computing {what}" if what else ""
        super().__init__(f"degree {degree} exceeds budget {bound}{detail}")


class ParseError(HopfRingError):
    """A token string could not be parsed."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")
