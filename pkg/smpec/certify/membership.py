"""
Solution-set membership test from a certified KKT point x̄:

    x in S_M  iff  x in C, g_D(x) = 0, <u, x - x̄> = 0 for some u in df(x),
                   and <F(y_i), x - y_i> = 0 for every certificate point with lambda_i > 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ..config import GapConfig
from ..errors import UncertifiedInput
from ..gap.dual_gap import eval_gap, inner_objective
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector, as_vector
from .kkt import KktCertificate

logger = logging.getLogger(__name__)


@dataclass
class MembershipReport:
    candidate: Vector
    checks: Dict[str, bool] = field(default_factory=dict)
    values: Dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "candidate": self.candidate.tolist(),
            "checks": dict(self.checks),
            "values": dict(self.values),
        }


def _orthogonal_subgradient_gap(lo: Vector, hi: Vector, d: Vector) -> float:
    """Distance from 0 to the interval {<u, d> : lo <= u <= hi}"""
    lo_val = float(np.sum(np.where(d >= 0, lo, hi) * d))
    hi_val = float(np.sum(np.where(d >= 0, hi, lo) * d))
    if lo_val <= 0.0 <= hi_val:
        return 0.0
    return min(abs(lo_val), abs(hi_val))


def membership_check(
    inst: ProblemInstance,
    cert: KktCertificate,
    x_bar: ArrayLike,
    x: ArrayLike,
    tol: float = 1e-6,
    config: Optional[GapConfig] = None,
) -> MembershipReport:
    if not cert.certified:
        raise UncertifiedInput("membership needs a certified KKT certificate at x̄")
    inst = ensure_validated(inst)
    x_bar = as_vector(x_bar, inst.dimension)
    x = as_vector(x, inst.dimension)
    report = MembershipReport(candidate=x)

    violation = inst.set.violation(x)
    report.values["set_violation"] = violation
    report.checks["in_set"] = violation <= tol
    if not report.checks["in_set"]:
        logger.warning(f"Candidate {x.tolist()} lies outside C")
        return report

    gap = eval_gap(inst, x, config).value
    report.values["gap"] = gap
    report.checks["lower_level"] = gap <= tol

    lo, hi = inst.objective.subdifferential_box(x)
    orth = _orthogonal_subgradient_gap(lo, hi, x - x_bar)
    report.values["subgradient_orthogonality"] = orth
    report.checks["subgradient_orthogonal"] = orth <= tol

    active = [y for y, lam in zip(cert.points, cert.multipliers) if lam > 0]
    worst = max((abs(inner_objective(inst, x, y)) for y in active), default=0.0)
    report.values["complementarity"] = worst
    report.checks["complementarity"] = worst <= tol

    if report.verdict:
        logger.info(f"Membership PASSED for {x.tolist()}")
    else:
        failed = [name for name, ok in report.checks.items() if not ok]
        logger.warning(f"Membership FAILED for {x.tolist()}: {failed}")
    return report
