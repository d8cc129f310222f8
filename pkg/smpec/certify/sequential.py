"""
Sequential optimality residuals along a regularization trace.

With lambda_k the weight on g_D, y_k = x_k, v_k = sum mu_i F(y_i) (Caratheodory
reduced) and w_k = -u_k - lambda_k v_k:

    r1 = ||u + lambda_k sum mu_i F(y_i) + w_k||
    r2 = ||x_k - x̄||
    r3 = lambda_k g_D(x_k) - <lambda_k v_k, x_k - x̄>
    r4 = <w_k, y_k - x̄>
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..gap.caratheodory import ConvexCombination, caratheodory_reduce
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector, as_vector
from ..solver.regularization import SolveTrace

logger = logging.getLogger(__name__)

TAIL = 10


@dataclass
class SequentialResiduals:
    reference: Vector
    u: Vector
    r1: List[float] = field(default_factory=list)
    r2: List[float] = field(default_factory=list)
    r3: List[float] = field(default_factory=list)
    r4: List[float] = field(default_factory=list)
    combinations: List[ConvexCombination] = field(default_factory=list, repr=False)

    def tail_max(self, name: str, tail: int = TAIL) -> float:
        values = getattr(self, name)[-tail:]
        return float(max(abs(v) for v in values))

    @property
    def tail_maxima(self) -> dict:
        return {name: self.tail_max(name) for name in ("r1", "r2", "r3", "r4")}

    def within(self, tol: float) -> bool:
        return all(v <= tol for v in self.tail_maxima.values())

    def to_dict(self) -> dict:
        return {
            "reference": self.reference.tolist(),
            "u": self.u.tolist(),
            "r1": list(self.r1),
            "r2": list(self.r2),
            "r3": list(self.r3),
            "r4": list(self.r4),
            "tail_maxima": self.tail_maxima,
            "support_sizes": [len(c.points) for c in self.combinations],
        }


def sequential_residuals(
    inst: ProblemInstance, trace: SolveTrace, x_bar: Optional[ArrayLike] = None
) -> SequentialResiduals:
    if len(trace) == 0:
        raise ValueError("trace is empty")
    inst = ensure_validated(inst)
    x_bar = trace.final_x if x_bar is None else as_vector(x_bar, inst.dimension)
    u = inst.objective.subgradient(x_bar)
    out = SequentialResiduals(reference=x_bar, u=u)

    for rec in trace.records:
        generators = [inst.map(y) for y in rec.maximizers] or [rec.v]
        combo = caratheodory_reduce(generators, rec.v)
        out.combinations.append(combo)
        mixed = combo.combine()
        lam = rec.penalty
        out.r1.append(float(np.linalg.norm(u + lam * mixed + rec.w)))
        out.r2.append(float(np.linalg.norm(rec.x - x_bar)))
        out.r3.append(float(lam * (rec.gap - mixed @ (rec.x - x_bar))))
        out.r4.append(float(rec.w @ (rec.x - x_bar)))

    logger.info(
        "Sequential residual tail maxima: "
        + ", ".join(f"{k}={v:.3e}" for k, v in out.tail_maxima.items())
    )
    return out
