"""Exception hierarchy shared across the solver."""


class AvflowError(Exception):
    """Base class for all solver errors."""


class NonZeroMean(AvflowError):
    """Poisson right-hand side has a non-negligible mean; problem ill-posed on the torus."""


class DegenerateLoop(AvflowError):
    """Marker loop has (nearly) coincident consecutive points."""


class InsufficientHistory(AvflowError):
    """Pressure recovery needs at least three uniformly spaced time samples."""


class CflViolation(AvflowError):
    """Requested time step exceeds the CFL-limited bound."""


class NonFinite(AvflowError):
    """A field left the finite range (NaN or Inf) during evolution."""


class NoContraction(AvflowError):
    """Picard residuals failed to decrease; fixed-point regime lost (T too large)."""


class GridMismatch(AvflowError):
    """Two states live on incompatible grids."""


class BadParameters(AvflowError):
    """Scenario parameters are invalid or incomplete."""


class ConfigError(AvflowError):
    """Run configuration file failed to parse or validate."""
