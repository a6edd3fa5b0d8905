"""Exception hierarchy.

Two roots matter to callers: :class:`ValidationError` for bad inputs
(CLI exit code 1) and :class:`NumericalError` for failures of the numerics
on otherwise valid inputs (CLI exit code 2).
"""


class PolityError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PolityError, ValueError):
    """An input violates a documented invariant."""


class NumericalError(PolityError, ArithmeticError):
    """A computation could not be completed on a valid input."""


# -- ingestion -------------------------------------------------------------

class NonSquare(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class NegativeEntry(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"entry ({row + 1}, {col + 1}) is negative: {value!r}")


class NonPositiveEntry(ValidationError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(
            f"entry ({row + 1}, {col + 1}) is not strictly positive: {value!r}"
        )


class RowSumViolation(ValidationError):
    def __init__(self, row, deviation, message=None):
        self.row, self.deviation = row, deviation
        super().__init__(
            message or f"row {row + 1} sums to 1 {deviation:+.3e}, outside tolerance"
        )


class NotSubstochastic(RowSumViolation):
    pass


class NonPositiveWeight(ValidationError):
    pass


class BadIndexSet(ValidationError):
    pass


# -- numerics --------------------------------------------------------------

class NoConvergence(NumericalError):
    pass


class SingularBlock(NumericalError):
    pass


class SingularVoterBlock(SingularBlock):
    """``I - A_II`` is singular because a family lives inside the voter set."""

    def __init__(self, family):
        self.family = frozenset(family)
        members = ", ".join(str(i + 1) for i in sorted(self.family))
        super().__init__(f"voter block is singular: family {{{members}}} lies inside it")


class FullRank(NumericalError):
    pass


class OmegaSingular(NumericalError):
    def __init__(self, omega, message="U* N V is singular; expansion does not apply"):
        self.omega = omega
        super().__init__(message)


class AmbiguousMixing(NumericalError):
    def __init__(self, dimension):
        self.dimension = dimension
        super().__init__(
            f"coupling matrix has a {dimension}-dimensional left kernel; "
            "the limit power is not determined at first order"
        )


class InvalidAtEps(NumericalError):
    def __init__(self, eps, cause):
        self.eps = eps
        super().__init__(f"A_hat + eps*B is not a politics matrix at eps={eps:g}: {cause}")


class TooLarge(PolityError):
    pass


class ThresholdTooLarge(ValidationError):
    pass


class NotUpperClass(ValidationError):
    pass


class BadDistribution(ValidationError):
    pass


class CyclicSpec(ValidationError):
    pass


class BadParameters(ValidationError):
    pass


class EpsTooLarge(ValidationError):
    pass


class WalkLimitExceeded(NumericalError):
    pass


class ResampleLimit(NumericalError):
    pass
