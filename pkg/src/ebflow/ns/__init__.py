"""Two-phase incompressible flow with front-tracked surface tension (2D)."""
from .operators import (bilinear_cell_sampler, face_states, helmholtz_solve, laplacian,
                        laplacian_matrix, mac_sampler, pressure_gradient_field, riemann_burgers)
from .params import ARKTableau, FlowBC, FluidParams, SCHEMES, TimeStepConfig
from .projection import (control_volume_divergence, interface_curvature, project,
                         project_with_operator)
from .state import FlowState, geometry_from_front, initial_state, write_frame_csv
from .stepper import (ark2_step, compute_dt, convection_term, diffuse_crank_nicolson, pressure_forcing,
                      step)


def pressure_gradient_ls(disc, pressure, cell, component, order="quadratic"):
    """Least-squares gradient of one component's pressure at one cell centre."""
    import numpy as np
    mesh = disc.geometry.mesh
    comp = np.full(mesh.cells, -1)
    comp[tuple(cell)] = component
    return pressure_gradient_field(mesh, disc, pressure, comp, order)[tuple(cell)]


__all__ = [
    "ARKTableau", "FlowBC", "FlowState", "FluidParams", "SCHEMES", "TimeStepConfig", "ark2_step",
    "bilinear_cell_sampler", "compute_dt", "control_volume_divergence", "convection_term",
    "diffuse_crank_nicolson", "face_states", "geometry_from_front", "helmholtz_solve",
    "initial_state", "interface_curvature", "laplacian", "laplacian_matrix", "mac_sampler",
    "pressure_forcing", "pressure_gradient_field", "pressure_gradient_ls", "project",
    "project_with_operator", "riemann_burgers", "step", "write_frame_csv",
]
