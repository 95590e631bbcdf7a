"""Exception types raised across the package."""


class QSSError(Exception):
    """Base class for all package errors."""


class InvalidArgument(QSSError, ValueError):
    pass


class InvalidState(QSSError):
    """An operation was applied to a state it does not accept."""


class DegenerateMeasurement(QSSError):
    pass


class UndefinedGain(QSSError, ValueError):
    """Optical gain requested for a quadrature with zero input amplitude."""


class InconsistentState(QSSError):
    """Derived quantities disagree beyond numerical slack (propagation bug)."""


class PhysicalityError(QSSError):
    """Covariance violates the uncertainty principle."""
