from .cutcell import (CellType, CutGeometry, EdgeCrossing, build_geometry, classify_cells,
                      crossings_from_list, crossings_to_list, cut_cell_moments_2d,
                      cut_cell_moments_3d)
from .mesh import CoordSystem, Mesh

__all__ = ["CellType", "CoordSystem", "CutGeometry", "EdgeCrossing", "Mesh", "build_geometry",
           "classify_cells", "crossings_from_list", "crossings_to_list", "cut_cell_moments_2d",
           "cut_cell_moments_3d"]
