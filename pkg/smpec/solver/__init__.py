"""
Regularization loop for SMPEC, its subproblem solver and the reference VI solver.
"""

from .extragradient import ViSolveResult, solve_vi
from .regularization import IterationRecord, SolveTrace, TraceStatus, solve_smpec
from .subgradient import SubproblemResult, solve_pk

__all__ = [
    "ViSolveResult",
    "solve_vi",
    "IterationRecord",
    "SolveTrace",
    "TraceStatus",
    "solve_smpec",
    "SubproblemResult",
    "solve_pk",
]
