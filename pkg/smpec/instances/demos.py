"""
Built-in demo instances

- example-3-1: F(x) = x on [-1, 1]; the weak BCQ fails at 0
- example-3-2: F = (1, 1) on [0, 1]^2 with f = ||x||^2; the weak BCQ holds at 0
- min-norm-lp: minimum-norm primal-dual pair of min x s.t. x >= 1
- distance-estimation: distance from (2, 2) to argmin{x1^2 : x in [-1, 1]^2}
- basis-pursuit: min ||x||_1 s.t. x1 + x2 = 1, posed through ||Ax - b||^2
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

from ..config import SolveConfig
from ..model.instance import ProblemInstance, validate_instance
from ..model.maps import MonotoneMap
from ..model.objectives import ConvexObjective
from ..model.sets import Box, ConvexSet
from ..model.types import ArrayLike, as_matrix, as_vector
from .schema import serialize_instance

logger = logging.getLogger(__name__)


def _validated(inst: ProblemInstance) -> ProblemInstance:
    return validate_instance(inst).instance


def primal_dual_lp_instance(
    A: ArrayLike,
    b: ArrayLike,
    c: ArrayLike,
    radius: float = 10.0,
    known_solution: Optional[ArrayLike] = None,
    name: str = "primal-dual-lp",
) -> ProblemInstance:
    """
    Minimum-norm primal-dual pair of min <c, x> s.t. Ax >= b, x >= 0.

    F(x, y) = [[0, -A^T], [A, 0]] (x, y) + (c, -b) is skew, hence monotone, and
    its VI over the nonnegative orthant (wrapped to [0, R]) has the primal-dual
    optimal pairs as solutions.
    """
    A = as_matrix(A)
    m, n = A.shape
    b = as_vector(b, m)
    c = as_vector(c, n)
    M = np.block([[np.zeros((n, n)), -A.T], [A, np.zeros((m, m))]])
    q = np.concatenate([c, -b])
    dim = n + m
    return _validated(
        ProblemInstance(
            objective=ConvexObjective.squared_norm(dim),
            map=MonotoneMap.affine(M, q),
            set=Box(np.zeros(dim), np.full(dim, float(radius))),
            dimension=dim,
            known_solution=known_solution,
            name=name,
        )
    )


def basis_pursuit_instance(
    A: ArrayLike,
    b: ArrayLike,
    radius: float = 10.0,
    known_solution: Optional[ArrayLike] = None,
    name: str = "basis-pursuit",
) -> ProblemInstance:
    """min ||x||_1 over argmin ||Ax - b||^2 on [-R, R]^n"""
    vi_map = MonotoneMap.gradient_of_quadratic(A, b)
    n = vi_map.dimension
    return _validated(
        ProblemInstance(
            objective=ConvexObjective.l1_norm(n),
            map=vi_map,
            set=Box(np.full(n, -float(radius)), np.full(n, float(radius))),
            dimension=n,
            known_solution=known_solution,
            name=name,
        )
    )


def distance_instance(
    A: ArrayLike,
    b: ArrayLike,
    cset: ConvexSet,
    point: ArrayLike,
    known_solution: Optional[ArrayLike] = None,
    name: str = "distance-estimation",
) -> ProblemInstance:
    """
    Nearest point to `point` in argmin{||Ax - b||^2 : x in C}.

    The solve summary reports d(point, S) = sqrt(2 f) at the terminal iterate.
    """
    vi_map = MonotoneMap.gradient_of_quadratic(A, b)
    return _validated(
        ProblemInstance(
            objective=ConvexObjective.quadratic_distance(as_vector(point, vi_map.dimension)),
            map=vi_map,
            set=cset,
            dimension=vi_map.dimension,
            known_solution=known_solution,
            name=name,
        )
    )


def example_3_1() -> ProblemInstance:
    return _validated(
        ProblemInstance(
            objective=ConvexObjective.squared_norm(1),
            map=MonotoneMap.affine([[1.0]], [0.0]),
            set=Box([-1.0], [1.0]),
            dimension=1,
            known_solution=[0.0],
            name="example-3-1",
        )
    )


def example_3_2() -> ProblemInstance:
    return _validated(
        ProblemInstance(
            objective=ConvexObjective.squared_norm(2),
            map=MonotoneMap.affine(np.zeros((2, 2)), [1.0, 1.0]),
            set=Box([0.0, 0.0], [1.0, 1.0]),
            dimension=2,
            known_solution=[0.0, 0.0],
            name="example-3-2",
        )
    )


class DemoName(str, Enum):
    """Available demo instances"""

    EXAMPLE_3_1 = "example-3-1"
    EXAMPLE_3_2 = "example-3-2"
    MIN_NORM_LP = "min-norm-lp"
    DISTANCE_ESTIMATION = "distance-estimation"
    BASIS_PURSUIT = "basis-pursuit"


@dataclass
class DemoSpec:
    """A demo instance with the solver settings it ships with"""

    name: DemoName
    description: str
    build: Callable[[], ProblemInstance]
    solve_overrides: Dict[str, Any] = field(default_factory=dict)
    certify_tol: float = 1e-6
    expected: Dict[str, Any] = field(default_factory=dict)

    def instance(self) -> ProblemInstance:
        return self.build()

    def solve_config(self, base: Optional[SolveConfig] = None) -> SolveConfig:
        """Demo settings layered over a base config"""
        return replace(base or SolveConfig(), **self.solve_overrides)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name.value,
            "description": self.description,
            "solve_overrides": dict(self.solve_overrides),
            "certify_tol": self.certify_tol,
            "expected": dict(self.expected),
        }


DEMOS = {
    DemoName.EXAMPLE_3_1: DemoSpec(
        name=DemoName.EXAMPLE_3_1,
        description="F(x) = x on [-1, 1], f = x^2; weak BCQ fails at 0",
        build=example_3_1,
        expected={"x": [0.0], "objective": 0.0, "iterations": 1, "weak_bcq": "fails"},
    ),
    DemoName.EXAMPLE_3_2: DemoSpec(
        name=DemoName.EXAMPLE_3_2,
        description="F = (1, 1) on [0, 1]^2, f = ||x||^2; weak BCQ holds at 0",
        build=example_3_2,
        solve_overrides={"x0": [1.0, 1.0]},
        expected={"x": [0.0, 0.0], "objective": 0.0, "iterations": 1, "weak_bcq": "holds"},
    ),
    DemoName.MIN_NORM_LP: DemoSpec(
        name=DemoName.MIN_NORM_LP,
        description="minimum-norm primal-dual pair of min x s.t. x >= 1, x >= 0",
        build=lambda: primal_dual_lp_instance(
            [[1.0]], [1.0], [1.0], radius=10.0, known_solution=[1.0, 1.0], name="min-norm-lp"
        ),
        # exact penalty once lambda >= 2, so k = 0 already lands on (1, 1)
        solve_overrides={"epsilon0": 0.1, "mu": 1e-5},
        certify_tol=1e-5,
        expected={"x": [1.0, 1.0], "objective": 2.0, "iterations": 1},
    ),
    DemoName.DISTANCE_ESTIMATION: DemoSpec(
        name=DemoName.DISTANCE_ESTIMATION,
        description="distance from (2, 2) to argmin{x1^2 : x in [-1, 1]^2}",
        build=lambda: distance_instance(
            [[1.0, 0.0]],
            [0.0],
            Box([-1.0, -1.0], [1.0, 1.0]),
            [2.0, 2.0],
            known_solution=[0.0, 1.0],
        ),
        # g_D(x_k) = 2 / (1 + lambda_k)^2: two outer steps, lambda = 3333 then 6667
        solve_overrides={"epsilon0": 3e-4, "mu": 1e-7},
        expected={"x": [0.0, 1.0], "distance": float(np.sqrt(5.0)), "iterations": 2},
    ),
    DemoName.BASIS_PURSUIT: DemoSpec(
        name=DemoName.BASIS_PURSUIT,
        description="min ||x||_1 s.t. x1 + x2 = 1 on [-10, 10]^2",
        build=lambda: basis_pursuit_instance(
            [[1.0, 1.0]], [1.0], radius=10.0, known_solution=[0.5, 0.5]
        ),
        # g_D(x_k) = 1 / (2 lambda_k^2) on the diagonal: lambda = 1667 then 3333
        solve_overrides={"epsilon0": 6e-4, "mu": 1e-7},
        expected={"x": [0.5, 0.5], "objective": 1.0, "iterations": 2},
    ),
}


def get_demo(name: Union[str, DemoName]) -> DemoSpec:
    """Look a demo up by name; unknown names raise KeyError listing the choices"""
    try:
        return DEMOS[DemoName(name)]
    except ValueError:
        raise KeyError(
            f"unknown demo {name!r}; available: {', '.join(d.value for d in DemoName)}"
        ) from None


def list_demos() -> List[DemoSpec]:
    return list(DEMOS.values())


def materialize_demo(name: Union[str, DemoName], path: Union[str, Path]) -> Path:
    """Write the demo's instance file and return its path"""
    preset = get_demo(name)
    path = Path(path)
    serialize_instance(preset.instance(), path)
    logger.info(f"Wrote demo instance {preset.name.value} to {path}")
    return path
