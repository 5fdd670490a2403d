"""Exception types shared across the package."""


class HorseshoeError(Exception):
    """Base class for all package errors."""


class InvalidSymbolError(HorseshoeError, ValueError):
    """A symbol outside {1, 2, 3} was supplied."""


class CapacityError(HorseshoeError):
    """An enumeration request exceeded the configured depth cap."""


class MapDomainError(HorseshoeError, ValueError):
    """A map was evaluated outside its domain."""


class EscapeError(HorseshoeError):
    """An orbit left the rectangles before the requested number of steps."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"orbit escaped the rectangles at step {step}")


class TransitionError(HorseshoeError, ValueError):
    """An inverse branch was requested for a forbidden symbol transition."""


class ConstraintError(HorseshoeError, ValueError):
    """A stated precondition on constants or sequences does not hold."""


class ConvergenceError(HorseshoeError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )


class IntegrityError(HorseshoeError):
    """Computed data violates a structural invariant (e.g. nonpositive eigenfunction)."""


class ConfigError(HorseshoeError, ValueError):
    """A configuration file or override is invalid or fails an admission gate."""
