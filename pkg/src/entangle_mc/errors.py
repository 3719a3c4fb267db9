"""Exception types raised across the package."""


class EntangleError(Exception):
    """Base class for all package errors."""


class NotHermitian(EntangleError, ValueError):
    """Input matrix is not Hermitian within tolerance."""


class NotPSD(EntangleError, ValueError):
    """Input matrix has an eigenvalue below the PSD tolerance."""


class NotNormalized(EntangleError, ValueError):
    """State vector norm deviates from one."""


class InvalidState(EntangleError, ValueError):
    """Matrix fails a density-matrix invariant.

    ``reason`` is one of ``"shape"``, ``"non-finite"``, ``"non-hermitian"``,
    ``"trace"`` or ``"negative-eigenvalue"``.
    """

    def __init__(self, reason, detail=""):
        self.reason = reason
        msg = reason if not detail else f"{reason}: {detail}"
        super().__init__(msg)


class DomainError(EntangleError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RejectionBudgetExceeded(EntangleError, RuntimeError):
    """Rejection sampler ran out of attempts before filling its quota."""


class InvariantViolation(EntangleError, RuntimeError):
    """A numerical invariant that should hold by construction was broken."""


class ConfigError(EntangleError, ValueError):
    """Bad configuration value; ``key`` names the offending setting."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
