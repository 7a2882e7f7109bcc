"""Active-vector (Eulerian-Lagrangian) incompressible Euler solver on the
periodic box, with chart resetting, Picard fixed-point solving, conservation
and blow-up diagnostics, and a classical spectral oracle for cross-validation.
"""

from .spectral import Grid
from .evolve import ChartState, PicardRun, RunConfig
from .fields import HolderNorm, MarkerLoop

__all__ = ["Grid", "ChartState", "PicardRun", "RunConfig", "HolderNorm", "MarkerLoop"]
__version__ = "0.1.0"
