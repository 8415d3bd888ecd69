class ThetaLinkError(Exception):
    """Base class for library errors."""


class ConfigError(ThetaLinkError, ValueError):
    """Invalid parameters (bad theta, index out of range, malformed word, ...)."""


class BudgetExceeded(ThetaLinkError):
    """A requested computation exceeds the configured work budget."""


class ConvergenceError(ThetaLinkError, RuntimeError):
    """The tridiagonal QL iteration failed to converge."""
