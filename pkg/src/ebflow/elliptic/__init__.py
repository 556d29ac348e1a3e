"""Embedded-boundary discretisation of the elliptic interface problem."""
from .assembly import (Discretization, FaceOperator, assemble, assemble_cell_equation,
                       discretize_jump_conditions, interface_stencils)
from .problem import PERIODIC, BoundaryCondition, EllipticInterfaceProblem, all_faces, dirichlet, neumann
from .solve import (EllipticSolution, LinearSystem, error_norms, observed_orders, project_rhs, solve,
                    write_convergence_csv)
from .stencils import batched_stencils, normal_derivative_stencil
from .unknowns import UnknownMap, build_unknown_map, unknowns_for_geometry

__all__ = [
    "Discretization", "FaceOperator", "assemble", "assemble_cell_equation", "discretize_jump_conditions",
    "interface_stencils", "PERIODIC", "BoundaryCondition", "EllipticInterfaceProblem", "all_faces",
    "dirichlet", "neumann", "EllipticSolution", "LinearSystem", "error_norms", "observed_orders",
    "project_rhs", "solve", "write_convergence_csv", "batched_stencils", "normal_derivative_stencil",
    "UnknownMap", "build_unknown_map", "unknowns_for_geometry",
]
