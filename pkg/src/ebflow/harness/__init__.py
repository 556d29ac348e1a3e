"""Drivers, configuration and analysis for the reference scenarios."""
from .analysis import OscillationRecord, analytic_period_2d, analytic_period_3d, extract_period
from .config import DEFAULT_MESHES, SCENARIOS, RunConfig, load_config, parse_config
from .scenarios import (RUNNERS, run, run_bubble2d, run_elliptic_cart_manufactured,
                        run_elliptic_cyl_convergence, run_geometry_check, run_laplace_droplet)

__all__ = [
    "OscillationRecord", "analytic_period_2d", "analytic_period_3d", "extract_period", "DEFAULT_MESHES",
    "SCENARIOS", "RunConfig", "load_config", "parse_config", "RUNNERS", "run", "run_bubble2d",
    "run_elliptic_cart_manufactured", "run_elliptic_cyl_convergence", "run_geometry_check",
    "run_laplace_droplet",
]
