"""Exception hierarchy. The CLI maps these onto exit codes."""


class CarrollError(Exception):
    """Base class for all library errors."""


class DomainError(CarrollError):
    """A point or stencil left the valid domain (e.g. fiber coordinate at 0)."""


class ContractViolation(CarrollError):
    """A caller broke a documented precondition (dimension mismatch, non-unit direction, ...)."""


class ConstructionError(CarrollError):
    """Input data is internally inconsistent (bad partition of unity, section mismatch, ...)."""


class NumericError(CarrollError):
    """A numerical operation failed (ill-conditioned matrix, degenerate derivative, ...)."""
