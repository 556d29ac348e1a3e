"""Sharp-interface embedded-boundary solvers for two-phase incompressible flow."""
from . import errors
from .geometry import CellType, CoordSystem, CutGeometry, Mesh, build_geometry

__version__ = "0.1.0"

__all__ = ["errors", "CellType", "CoordSystem", "CutGeometry", "Mesh", "build_geometry"]
