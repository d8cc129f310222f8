"""
Dual gap function evaluation, near-maximizer sampling and Caratheodory reduction.
"""

from .caratheodory import ConvexCombination, caratheodory_reduce, reduce_weights
from .dual_gap import (
    GapEvaluation,
    argmax_set,
    eval_gap,
    gap_subgradient,
    inner_objective,
    probe_near_maximizers,
    semi_infinite_residual,
)
from .frank_wolfe import FrankWolfeResult, maximize_inner_quadratic

__all__ = [
    "ConvexCombination",
    "caratheodory_reduce",
    "reduce_weights",
    "GapEvaluation",
    "argmax_set",
    "eval_gap",
    "gap_subgradient",
    "inner_objective",
    "probe_near_maximizers",
    "semi_infinite_residual",
    "FrankWolfeResult",
    "maximize_inner_quadratic",
]
