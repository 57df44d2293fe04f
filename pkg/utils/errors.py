"""
Exception hierarchy for the closure toolkit.

Domain errors also derive from the closest builtin so callers can catch
ValueError / ArithmeticError without importing this module.
"""

from typing import Optional


class ClosureError(Exception):
    """Base class of every error raised by the toolkit."""


class ConfigError(ClosureError, ValueError):
    """Invalid parameters, plans or regime configuration."""


class DimensionError(ClosureError, ValueError):
    """Array shapes inconsistent with the model geometry."""


class InvalidRescaleError(ClosureError, ValueError):
    """Rescaling constants with non-positive standard deviation."""


class DegenerateAttractorError(ClosureError, ArithmeticError):
    """Calibration collapsed onto (or near) a fixed point."""

    def __init__(self, forcing: float, beta: float, threshold: float):
        self.forcing = forcing
        self.beta = beta
        self.threshold = threshold
        super().__init__(
            f"Degenerate attractor at forcing {forcing:g}: "
            f"standard deviation {beta:.3e} below {threshold:.1e}"
        )


class InvalidStateError(ClosureError, ValueError):
    """Non-finite initial state."""


class BlowUpError(ClosureError, ArithmeticError):
    """Integration produced a non-finite state."""

    def __init__(self, time: float, system: Optional[str] = None):
        self.time = time
        self.system = system
        where = f" in {system}" if system else ""
        super().__init__(f"Non-finite state{where} at t = {time:.6g}")


class EmptyInputError(ClosureError, ValueError):
    """No samples to compute a statistic from."""


class InsufficientDataError(ClosureError, ValueError):
    """Series too short for the requested lag window."""


class NonSPDCovarianceError(ClosureError, ArithmeticError):
    """Covariance matrix failed the symmetric positive-definite factorization."""


class GridMismatchError(ClosureError, ValueError):
    """Curves or histograms defined on different grids."""


class StageError(ClosureError, RuntimeError):
    """A regime pipeline stage failed; wraps the original error."""

    def __init__(self, stage: str, cause: BaseException, system: Optional[str] = None):
        self.stage = stage
        self.system = system
        self.cause = cause
        label = f"{stage}/{system}" if system else stage
        super().__init__(f"Stage '{label}' failed: {cause}")
