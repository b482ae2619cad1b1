"""Exception hierarchy shared by all toolkit modules."""


class NeumannKitError(Exception):
    """Base class for toolkit errors."""


class ParameterError(NeumannKitError, ValueError):
    """Invalid domain or configuration parameters."""


class UnsupportedError(NeumannKitError):
    """Operation not available for the given domain or field."""


class DomainError(NeumannKitError, ValueError):
    """Argument outside the mathematical domain of a function."""


class SearchError(NeumannKitError):
    """A bracketing or parameter search found nothing."""


class NoEigenvalueFound(NeumannKitError):
    """No singular-value minimum below threshold in the requested window."""


class BackendError(NeumannKitError):
    """Numerical backend failure (conditioning, rank collapse)."""


class OutOfRangeError(NeumannKitError, ValueError):
    """Evaluation point beyond the analytic extension margin."""


class ConsistencyError(NeumannKitError):
    """Two independent computations disagree."""


class ResolutionError(NeumannKitError):
    """Sampling too coarse to resolve the quantity reliably."""


class PreconditionError(NeumannKitError, ValueError):
    """Operation called outside its precondition."""


class ComplexBuildError(NeumannKitError):
    """Neumann complex assembly aborted."""
