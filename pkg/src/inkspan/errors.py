"""Exception hierarchy shared by every module of the package."""


class InkspanError(Exception):
    """Base class; the CLI maps subclasses to exit codes."""

    exit_code = 1


class InstanceError(InkspanError, ValueError):
    exit_code = 2


class NonMonotoneCapacity(InstanceError):
    pass


class NonPositiveDatum(InstanceError):
    pass


class LengthMismatch(InstanceError):
    pass


class UnknownItem(InkspanError, KeyError):
    exit_code = 2


class SizeLimit(InkspanError):
    """A desk-scale limit (enumeration leaves, knapsack items) was exceeded."""

    exit_code = 3


class BudgetExceeded(InkspanError):
    """The PTAS would have to solve more LPs than the configured budget."""

    exit_code = 3


class NumericalFailure(InkspanError):
    exit_code = 4


class NotTimeInvariant(InkspanError):
    exit_code = 2


class NotDivisible(InkspanError, ValueError):
    exit_code = 2


class GeneratorOverflow(InkspanError, OverflowError):
    exit_code = 2
