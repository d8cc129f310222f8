"""
Problem data model: monotone maps, convex sets, convex objectives and instances.
"""

from .instance import ProblemInstance, ValidationReport, ensure_validated, validate_instance
from .maps import MapKind, MonotoneMap
from .objectives import ConvexObjective, ObjectiveKind, subdifferential_box
from .sets import (
    Ball,
    Box,
    ConvexSet,
    Polytope,
    SetKind,
    Simplex,
    build_set,
    linear_minimizer,
    normal_cone_residual,
    project,
    sample_points,
    wrap_unbounded,
)
from .types import Matrix, Vector, as_vector

__all__ = [
    "ProblemInstance",
    "ValidationReport",
    "ensure_validated",
    "validate_instance",
    "MapKind",
    "MonotoneMap",
    "ConvexObjective",
    "ObjectiveKind",
    "subdifferential_box",
    "Ball",
    "Box",
    "ConvexSet",
    "Polytope",
    "SetKind",
    "Simplex",
    "build_set",
    "linear_minimizer",
    "normal_cone_residual",
    "project",
    "sample_points",
    "wrap_unbounded",
    "Matrix",
    "Vector",
    "as_vector",
]
