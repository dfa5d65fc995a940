"""G-spline surfaces: smooth splines on unstructured quad control nets.

Builds tangent-plane continuous spline surfaces over arbitrary
quadrilateral control nets (including boundary extraordinary vertices and
multiple extraordinary vertices per face), refines them with extended
Catmull-Clark rules, verifies continuity and shell validity, and solves
Poisson and membrane eigenvalue model problems with the isoparametric
Bubnov-Galerkin method.
"""

__version__ = "0.1.0"

from .archive import surface_from_json, surface_to_json
from .construct_c0 import build_c0, geometry_continuity_residual
from .construct_g1 import build_g1, g1_residual, solve_constrained_ls
from .evaluate import GSplineSurface, frame, map_point, sample_bezier_mesh
from .mesh import (
    CNet,
    ControlNet,
    classify_elements,
    classify_vertices,
    irregular_basis_vertices,
    load_obj,
    ring_faces,
    save_obj,
    spoke_edges,
)
from .quality import is_valid_at_thickness, min_invalid_thickness
from .refine import refine, refine_n
from .solve import (
    assemble_membrane_eigen,
    assemble_poisson,
    compute_errors,
    convergence_study,
    solve_generalized_eigen,
    solve_poisson,
)

__all__ = [
    "CNet",
    "ControlNet",
    "GSplineSurface",
    "assemble_membrane_eigen",
    "assemble_poisson",
    "build_c0",
    "build_g1",
    "classify_elements",
    "classify_vertices",
    "compute_errors",
    "convergence_study",
    "frame",
    "g1_residual",
    "geometry_continuity_residual",
    "irregular_basis_vertices",
    "is_valid_at_thickness",
    "load_obj",
    "map_point",
    "min_invalid_thickness",
    "refine",
    "refine_n",
    "ring_faces",
    "sample_bezier_mesh",
    "save_obj",
    "solve_constrained_ls",
    "solve_generalized_eigen",
    "solve_poisson",
    "spoke_edges",
    "surface_from_json",
    "surface_to_json",
]
