"""
Reference extragradient solver for the lower-level VI(F, C).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..config import GapConfig, ViConfig
from ..errors import IterationCapExceeded
from ..gap.dual_gap import eval_gap
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector, as_vector

logger = logging.getLogger(__name__)

STEP_SAFETY = 0.9
CHECK_EVERY = 10
MIN_STEP = 1e-14


@dataclass
class ViSolveResult:
    point: Vector
    residual: float
    iterations: int
    converged: bool
    step: float
    path: List[Vector] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "step": self.step,
        }


def solve_vi(
    inst: ProblemInstance,
    tol: Optional[float] = None,
    config: Optional[ViConfig] = None,
    x0: Optional[ArrayLike] = None,
    record_path: bool = False,
    gap_config: Optional[GapConfig] = None,
) -> ViSolveResult:
    """
    Extragradient iterations

        xb = P(x - tau F(x)),   x+ = P(x - tau F(xb))

    with tau halved whenever tau ||F(xb) - F(x)|| > 0.9 ||xb - x||. Converged when
    g_D(x) <= tol.
    """
    cfg = config or ViConfig()
    tol = cfg.tol if tol is None else tol
    inst = ensure_validated(inst)
    F, P = inst.map, inst.set.project
    x = P(as_vector(x0, inst.dimension)) if x0 is not None else inst.set.center()

    lipschitz = F.lipschitz_constant()
    if lipschitz is None:
        tau = 1.0
    elif lipschitz > 0:
        tau = 0.5 / lipschitz
    else:
        tau = max(1.0, inst.set.diameter())

    path = [x.copy()] if record_path else []
    residual = np.inf

    def finish(it: int, converged: bool) -> ViSolveResult:
        return ViSolveResult(
            point=x, residual=residual, iterations=it, converged=converged, step=tau, path=path
        )

    for it in range(1, cfg.max_iter + 1):
        Fx = F(x)
        while True:
            xb = P(x - tau * Fx)
            Fb = F(xb)
            if tau * np.linalg.norm(Fb - Fx) <= STEP_SAFETY * np.linalg.norm(xb - x):
                break
            if tau < MIN_STEP:
                break
            tau *= 0.5
            logger.debug(f"Extragradient step halved to {tau:.3e}")

        fixed = np.array_equal(xb, x)
        x = P(x - tau * Fb)
        if record_path:
            path.append(x.copy())

        if fixed or it % CHECK_EVERY == 0:
            residual = eval_gap(inst, x, gap_config).value
            if residual <= tol:
                logger.info(f"VI solved in {it} iterations, g_D = {residual:.3e}")
                return finish(it, True)

    residual = eval_gap(inst, x, gap_config).value
    partial = finish(cfg.max_iter, residual <= tol)
    if partial.converged:
        return partial
    raise IterationCapExceeded(
        f"extragradient did not reach g_D <= {tol:g} within {cfg.max_iter} iterations",
        iterations=cfg.max_iter,
        partial=partial,
    )
