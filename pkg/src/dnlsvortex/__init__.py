"""Vortex crosses in scalar and two-component discrete NLS lattices."""
from .lattice import GridShape, LatticeField, VortexSpec, build_contours, anti_continuum_seed
from .stationary import (StationaryState, newton_continue, residual, series_field,
                         solve_amplitudes, solve_at)

__version__ = "0.1.0"
