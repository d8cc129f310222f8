"""
Projected subgradient solver for the penalized subproblem

    (P)   min_{x in C}  f(x) + eps * g_D(x)
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..config import GapConfig, SubproblemConfig
from ..gap.dual_gap import GapEvaluation, eval_gap
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector, as_vector

logger = logging.getLogger(__name__)


@dataclass
class SubproblemResult:
    x: Vector
    value: float
    iterations: int
    converged: bool
    gap: GapEvaluation

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def solve_pk(
    inst: ProblemInstance,
    eps: float,
    x0: ArrayLike,
    cfg: Optional[SubproblemConfig] = None,
    gap_config: Optional[GapConfig] = None,
) -> SubproblemResult:
    """
    Approximately minimize f + eps * g_D over C from x0.

    Normalized projected subgradient steps with running-best tracking. The
    ``halving`` rule restarts from the best point with half the step every
    ``window`` steps; ``diminishing`` uses s0/sqrt(t+1) throughout.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    cfg = cfg or SubproblemConfig()
    cfg.validate()
    inst = ensure_validated(inst)
    cset = inst.set
    x = cset.project(as_vector(x0, inst.dimension))

    def oracle(point: Vector) -> Tuple[float, Vector, GapEvaluation]:
        ev = eval_gap(inst, point, gap_config)
        value = inst.objective.value(point) + eps * ev.value
        g = inst.objective.subgradient(point) + eps * ev.subgradient
        return value, g, ev

    diam = cset.diameter()
    step0 = cfg.step0 if cfg.step0 is not None else 0.1 * max(diam, 1e-12)
    step_floor = cfg.inner_tol * max(1.0, diam)

    value, g, ev = oracle(x)
    best_x, best_value, best_g, best_ev = x, value, g, ev
    history = [best_value]
    sigma = step0
    stage_t = 0
    converged = False
    t = 0

    for t in range(1, cfg.max_inner + 1):
        g_norm = float(np.linalg.norm(g))
        if g_norm == 0.0:
            converged = True
            break
        step = sigma / np.sqrt(stage_t + 1)
        x_new = cset.project(x - (step / g_norm) * g)
        if np.array_equal(x_new, x):
            # -g lies in N_C(x): x is optimal for the subproblem
            converged = True
            break

        x = x_new
        value, g, ev = oracle(x)
        if value < best_value:
            best_x, best_value, best_g, best_ev = x, value, g, ev
        history.append(best_value)
        stage_t += 1

        if cfg.step_rule == "halving":
            if stage_t >= cfg.window:
                sigma *= 0.5
                stage_t = 0
                x, value, g, ev = best_x, best_value, best_g, best_ev
                if sigma < step_floor:
                    converged = True
                    break
        elif t >= cfg.window and history[t - cfg.window] - best_value < cfg.inner_tol:
            converged = True
            break

    if not converged:
        logger.debug(f"Subproblem hit the cap of {cfg.max_inner} steps")
    logger.debug(
        f"Subproblem eps={eps:.3g}: value {best_value:.10g} after {t} steps"
    )
    if value < best_value:
        best_x, best_value, best_ev = x, value, ev
    return SubproblemResult(
        x=best_x,
        value=best_value,
        iterations=t,
        converged=converged,
        gap=best_ev,
    )
