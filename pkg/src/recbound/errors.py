"""Exception types shared across recbound modules."""


class RecboundError(Exception):
    """Base class for all recbound errors."""


class DomainError(RecboundError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(RecboundError):
    """A documented precondition of an operation does not hold."""


class ModelError(RecboundError):
    """The recurrence model is structurally unusable at a concrete point
    (e.g. a perturbed recursive argument fails to shrink)."""


class UnsupportedSymbolic(RecboundError):
    """A symbolic operation was asked of a non-symbolic (tabulated) function."""


class SpecFormatError(RecboundError):
    """A recurrence spec file or dict violates the documented schema."""


class NumericError(RecboundError):
    """Numerical evaluation failed to reach the requested accuracy.

    Carries the achieved error estimate in ``estimate`` when known.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
