class HKTError(Exception):
    """Base class for library errors."""


class DomainError(HKTError, ValueError):
    """A point lies outside the declared chart domain."""


class IntegrityError(HKTError, ValueError):
    """A structural precondition (J^2 = -1, hermiticity, type) failed at a point."""


class SingularMetricError(IntegrityError):
    pass


class DegreeError(HKTError, ValueError):
    pass


class DecompositionError(HKTError):
    """Root data does not admit the next sp(1) splitting step."""
