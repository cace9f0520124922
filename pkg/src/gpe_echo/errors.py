"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two fields that must share a grid were built on different grids."""


class BlowUpError(RuntimeError):
    """Propagation produced non-finite amplitudes (time step too large)."""


class ConvergenceError(RuntimeError):
    """Iteration cap reached before the convergence tolerance was met."""


class FitError(RuntimeError):
    """Curve fit rejected: precondition violated or optimizer diverged."""


class ConfigError(ValueError):
    """Configuration file is malformed, has unknown keys, or violates a constraint."""
