"""Exception hierarchy.

Every error carries an ``exit_code`` used at the CLI boundary:
2 for input validation failures, 3 for infeasible design constraints,
4 for exceeded enumeration/solve budgets.
"""


class RdcnError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class SpecValidationError(RdcnError):
    """Malformed or inconsistent input."""

    exit_code = 2


class ScheduleMismatchError(SpecValidationError):
    """Switch schedules have unequal lengths."""


class InvalidMatchingError(SpecValidationError):
    """A switch matching is not a bijection on the port range."""


class ConstraintViolationError(SpecValidationError):
    """A path or flow violates a structural or capacity constraint."""


class CoverageError(SpecValidationError):
    """A route ensemble does not cover a pair with positive demand."""


class RegularityError(SpecValidationError):
    """A digraph expected to be d-regular is not."""


class DegenerateDegreeError(SpecValidationError):
    """Degree parameter outside the supported range."""


class DomainError(SpecValidationError):
    """Argument outside the mathematical domain of a function."""


class UndefinedThroughputError(SpecValidationError):
    """Throughput is undefined, e.g. for an all-zero demand matrix."""


class RoutingError(SpecValidationError):
    """No route exists between a requested pair."""


class TraceParseError(SpecValidationError):
    """A workload or CDF file could not be parsed."""


class InfeasibleError(RdcnError):
    """Well-formed constraints that no design can satisfy."""

    exit_code = 3


class InfeasibleDelayError(InfeasibleError):
    """The requested delay bound is below what any degree achieves."""


class InfeasibleBufferError(InfeasibleError):
    """The per-node buffer is too small for even the minimum degree."""


class DivisibilityError(InfeasibleError):
    """The uplink count does not divide the matching count."""


class SpectralFailureError(InfeasibleError):
    """No generated graph met the spectral acceptance threshold."""

    def __init__(self, message, best_lambda2=None):
        super().__init__(message)
        self.best_lambda2 = best_lambda2


class BudgetExceededError(RdcnError):
    """An enumeration or solver budget was exceeded."""

    exit_code = 4
