"""
ProblemInstance (f, F, C) and the validator encoding the standing assumptions:
monotone F, convex compact C, convex f, one shared dimension.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import DimensionMismatch, MonotonicityViolation, ValidationError
from .maps import MONOTONICITY_TOL, MapKind, MonotoneMap
from .objectives import ConvexObjective
from .sets import Box, ConvexSet
from .types import Vector, frozen

logger = logging.getLogger(__name__)

MONOTONICITY_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    objective: ConvexObjective
    map: MonotoneMap
    set: ConvexSet
    dimension: int
    known_solution: Optional[Vector] = None
    name: str = "instance"
    validated: bool = False

    def __post_init__(self):
        if self.known_solution is not None:
            object.__setattr__(self, "known_solution", frozen(self.known_solution))

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "dimension": self.dimension,
            "objective": self.objective.to_dict(),
            "map": self.map.to_dict(),
            "set": self.set.to_dict(),
        }
        if self.known_solution is not None:
            data["known_solution"] = self.known_solution.tolist()
        return data


@dataclass
class ValidationReport:
    """Outcome of validate_instance"""

    dimension: int
    dimensions_consistent: bool
    monotone: bool
    monotonicity_method: str
    min_eigenvalue: Optional[float]
    min_sampled_product: Optional[float]
    bounded: bool
    instance: Optional[ProblemInstance] = field(default=None, repr=False)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "dimensions_consistent": self.dimensions_consistent,
            "monotone": self.monotone,
            "monotonicity_method": self.monotonicity_method,
            "min_eigenvalue": self.min_eigenvalue,
            "min_sampled_product": self.min_sampled_product,
            "bounded": self.bounded,
            "notes": list(self.notes),
        }


def _check_dimensions(inst: ProblemInstance) -> None:
    n = inst.dimension
    for part, obj in (("objective", inst.objective), ("map", inst.map), ("set", inst.set)):
        if obj.dimension != n:
            raise DimensionMismatch(
                f"{part} has dimension {obj.dimension}, instance declares {n}",
                expected=n,
                actual=obj.dimension,
                field=part,
            )
    for part, obj in (("map", inst.map), ("objective", inst.objective)):
        for name, problem in obj.shape_errors().items():
            raise DimensionMismatch(
                f"{part}.params.{name}: {problem}",
                expected=n,
                actual=-1,
                field=f"{part}.params.{name}",
            )
    if inst.known_solution is not None and inst.known_solution.shape[0] != n:
        raise DimensionMismatch(
            "known_solution length differs from dimension",
            expected=n,
            actual=inst.known_solution.shape[0],
            field="known_solution",
        )


def _sampled_monotonicity(inst: ProblemInstance, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    xs = inst.set.sample_points(MONOTONICITY_SAMPLES, rng)
    ys = inst.set.sample_points(MONOTONICITY_SAMPLES, rng)
    worst = np.inf
    for x, y in zip(xs, ys):
        product = float((inst.map(y) - inst.map(x)) @ (y - x))
        if product < worst:
            worst = product
        if product < -MONOTONICITY_TOL:
            raise MonotonicityViolation(
                f"sampled pair violates monotonicity: <F(y)-F(x), y-x> = {product:.3e}",
                pair=(x.tolist(), y.tolist()),
            )
    return worst


def validate_instance(inst: ProblemInstance) -> ValidationReport:
    """
    Check dimensions, monotonicity of F and boundedness of C.

    Raises on the first failed assumption; on success the report carries a copy
    of the instance marked as validated.
    """
    _check_dimensions(inst)

    if isinstance(inst.set, Box) and np.any(inst.set.lower > inst.set.upper):
        raise ValidationError("box lower bound exceeds upper bound")

    inst.set.require_bounded()

    min_eig = None
    min_product = None
    if inst.map.is_affine:
        method = "eigenvalue"
        min_eig = inst.map.min_symmetric_eigenvalue()
        if min_eig < -MONOTONICITY_TOL:
            raise MonotonicityViolation(
                f"symmetric part of M has eigenvalue {min_eig:.6g} < 0",
                eigenvalue=min_eig,
            )
    else:
        method = "sampled"
        min_product = _sampled_monotonicity(inst)

    report = ValidationReport(
        dimension=inst.dimension,
        dimensions_consistent=True,
        monotone=True,
        monotonicity_method=method,
        min_eigenvalue=min_eig,
        min_sampled_product=min_product,
        bounded=True,
        instance=replace(inst, validated=True),
    )
    if inst.map.kind == MapKind.BLACK_BOX:
        report.notes.append("monotonicity of a black-box map is sample-checked only")
    logger.debug(f"Validated {inst.name}: {report.to_dict()}")
    return report


def ensure_validated(inst: ProblemInstance) -> ProblemInstance:
    if inst.validated:
        return inst
    return validate_instance(inst).instance
