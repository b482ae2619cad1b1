"""Dirichlet eigenfunctions of planar domains and their Neumann domain partitions."""

from .analysis import (courant_check, corollary_checks, flower_a_search, gradient_bound_check,
                       identity_checks, nodal_partition, payne_points, symmetry_and_maxima_check)
from .critical import (CriticalCircle, CriticalPoint, CriticalSet, Kind, detect_critical_circle,
                       find_critical_points, morse_counts, multiplicity, winding_index)
from .eigenfield import EigenField, closed_form, evaluate
from .flow import Direction, EndKind, EndPoint, Trajectory, left_end, separatrices, trace
from .geometry import DomainSpec, boundary, contains, min_mean_curvature_bound, symmetry_rays
from .mfs import mfs_solve
from .neumann_complex import NeumannComplex, build, count_neumann_domains, euler_audit
from .solve import Solver

__version__ = "0.1.0"

__all__ = [
    "DomainSpec", "boundary", "contains", "min_mean_curvature_bound", "symmetry_rays",
    "EigenField", "closed_form", "evaluate", "mfs_solve", "Solver",
    "CriticalPoint", "CriticalCircle", "CriticalSet", "Kind", "find_critical_points", "winding_index",
    "multiplicity", "detect_critical_circle", "morse_counts",
    "Direction", "EndKind", "EndPoint", "Trajectory", "trace", "left_end", "separatrices",
    "NeumannComplex", "build", "count_neumann_domains", "euler_audit",
    "nodal_partition", "payne_points", "courant_check", "corollary_checks", "gradient_bound_check",
    "flower_a_search", "symmetry_and_maxima_check", "identity_checks",
]
