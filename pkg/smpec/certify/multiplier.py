"""
Multiplier certificate under the weak basic constraint qualification:

    -sum_i beta_i F(y_i) in df(x̄) + N_C(x̄),   y_i in Y(x̄), beta_i >= 0,

and its single-multiplier form 0 in df(x̄) + y* dg_D(x̄) + N_C(x̄) with
y* = sum beta_i. The calmness hypothesis behind the latter is assumed, not checked.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from ..config import GapConfig
from ..model.instance import ProblemInstance
from ..model.types import ArrayLike, Vector
from .kkt import candidate_points, fit_multipliers, require_lower_level_solution

logger = logging.getLogger(__name__)


@dataclass
class MultiplierCertificate:
    point: Vector
    betas: List[float]
    points: List[Vector]
    residual: float
    tol: float
    u: Vector
    notes: List[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.residual <= self.tol

    @property
    def scalar_multiplier(self) -> float:
        """y* = sum of betas"""
        return float(sum(self.betas))

    @property
    def convex_weights(self) -> Optional[List[float]]:
        total = self.scalar_multiplier
        if total <= 0:
            return None
        return [b / total for b in self.betas]

    def to_dict(self) -> dict:
        return {
            "verdict": "certified" if self.certified else "not-certified",
            "point": self.point.tolist(),
            "residual": self.residual,
            "multipliers": [float(b) for b in self.betas],
            "points": [y.tolist() for y in self.points],
            "scalar_multiplier": self.scalar_multiplier,
            "convex_weights": self.convex_weights,
            "u": self.u.tolist(),
            "tol": self.tol,
            "notes": list(self.notes),
        }


def multiplier_certificate(
    inst: ProblemInstance,
    x_bar: ArrayLike,
    tol: float = 1e-6,
    config: Optional[GapConfig] = None,
) -> MultiplierCertificate:
    inst, x_bar, _ = require_lower_level_solution(inst, x_bar, tol, config)
    fit = fit_multipliers(inst, x_bar, candidate_points(inst, x_bar, tol, config))
    cert = MultiplierCertificate(
        point=x_bar,
        betas=fit.multipliers,
        points=fit.points,
        residual=fit.residual,
        tol=tol,
        u=fit.u,
        notes=["calmness of the reformulation is assumed, not verified"],
    )
    if cert.certified:
        logger.info(f"Multiplier certificate PASSED, y* = {cert.scalar_multiplier:.6g}")
    else:
        logger.warning(f"Multiplier certificate FAILED, residual {cert.residual:.3e}")
    return cert
