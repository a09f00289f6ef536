"""Exception types shared across the package.

Exit-code mapping used by the CLI: configuration problems -> 2,
numeric-budget problems -> 3, degenerate physical parameters -> 4.
"""


class ConfigError(ValueError):
    """Invalid run configuration (bad flag, malformed range, schema violation)."""


class DegenerateParameterError(ValueError):
    """Parameters for which the requested quantity is undefined (e.g. |u| = 1)."""


class ResonanceError(ValueError):
    """A Schrieffer-Wolff denominator vanishes for some reservoir level."""


class StepSizeError(ValueError):
    """Time step too coarse to resolve the fastest kernel oscillation."""


class DimensionBudgetError(ValueError):
    """Requested dense eigenproblem exceeds the size budget."""


class DegenerateSpectrumError(ValueError):
    """Long-time averaging formula requires a nondegenerate spectrum."""


class BoundaryReachedError(RuntimeError):
    """Finite-chain wavefront reached the open boundary; later times untrusted."""

    def __init__(self, message: str, t_safe: float):
        super().__init__(message)
        self.t_safe = t_safe


class TailBoundError(RuntimeError):
    """Bromwich truncation could not meet the tail bound within the cap."""


class GridMismatchError(ValueError):
    """Trace collection does not cover the momentum grid it is paired with."""
