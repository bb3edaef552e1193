"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class PfaffrepError(Exception):
    """Base class for all errors raised by pfaffrep."""


class UsageError(PfaffrepError):
    """Bad input from the caller (maps to CLI exit code 2)."""


class InternalInvariantError(PfaffrepError):
    """A claim the pipeline checks at runtime turned out false (exit code 3)."""


class MismatchedRing(UsageError, ArithmeticError):
    pass


class PolySyntaxError(UsageError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NonHomogeneous(UsageError):
    def __init__(self, term: str, degree: int, expected: int):
        super().__init__(f"term {term!r} has degree {degree}, expected {expected}")
        self.term = term


class DegreeMismatch(UsageError):
    pass


class IndexOutOfRange(UsageError, IndexError):
    pass


class OddSize(UsageError):
    pass


class SizeGuardExceeded(UsageError):
    pass


class UnsupportedDegree(UsageError):
    pass


class DegreeCapExceeded(UsageError):
    pass


class StructureViolation(InternalInvariantError):
    pass


class LinearityViolation(InternalInvariantError):
    pass


class PurePowerViolation(InternalInvariantError):
    pass


class NotSolvableOverZ(PfaffrepError):
    """A column of the right-hand side is outside the integer span of A."""

    def __init__(self, theta_column, residue):
        super().__init__(
            f"system is not solvable over Z for theta column {theta_column}: "
            f"residue {residue}"
        )
        self.theta_column = theta_column
        self.residue = residue


class VerificationFailed(InternalInvariantError):
    pass


class CorruptCache(PfaffrepError):
    pass
