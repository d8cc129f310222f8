"""
KKT certificate: find y_i in C and lambda_i >= 0 with

    0 in df(x̄) + sum_i lambda_i F(y_i) + N_C(x̄),   <F(y_i), x̄ - y_i> = 0,

at a point x̄ solving the lower-level VI.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import lsq_linear

from ..config import GapConfig
from ..errors import LowerLevelInfeasible, UncertifiedInput
from ..gap.caratheodory import reduce_weights
from ..gap.dual_gap import (
    argmax_set,
    dedupe,
    eval_gap,
    inner_objective,
    probe_near_maximizers,
)
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector

logger = logging.getLogger(__name__)


@dataclass
class MultiplierFit:
    """Least-residual solution of 0 in u + sum lambda_i F(y_i) + N_C(x̄), u in df(x̄)"""

    points: List[Vector]
    multipliers: List[float]
    u: Vector
    residual: float


@dataclass
class KktCertificate:
    point: Vector
    points: List[Vector]
    multipliers: List[float]
    u: Vector
    stationarity_residual: float
    complementarity_residual: float
    tol: float
    gap: float
    notes: List[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return max(self.stationarity_residual, self.complementarity_residual) <= self.tol

    def to_dict(self) -> dict:
        return {
            "verdict": "certified" if self.certified else "not-certified",
            "point": self.point.tolist(),
            "gap": self.gap,
            "residuals": {
                "stationarity": self.stationarity_residual,
                "complementarity": self.complementarity_residual,
            },
            "multipliers": [float(v) for v in self.multipliers],
            "points": [y.tolist() for y in self.points],
            "u": self.u.tolist(),
            "tol": self.tol,
            "notes": list(self.notes),
        }


def require_lower_level_solution(
    inst: ProblemInstance, x_bar: ArrayLike, tol: float, config: Optional[GapConfig] = None
) -> Tuple[ProblemInstance, Vector, float]:
    inst = ensure_validated(inst)
    x_bar = inst.set.require_member(x_bar)
    ev = eval_gap(inst, x_bar, config)
    if not ev.certified:
        raise UncertifiedInput(
            f"g_D at x̄ comes from multistart ascent on a black-box map; "
            f"{inst.name} has no exact maximizers to certify with"
        )
    if ev.value > tol:
        raise LowerLevelInfeasible(
            f"g_D(x̄) = {ev.value:.3e} exceeds tol {tol:g}; x̄ does not solve the VI",
            gap=ev.value,
            tol=tol,
        )
    return inst, x_bar, ev.value


def candidate_points(
    inst: ProblemInstance, x_bar: Vector, tol: float, config: Optional[GapConfig] = None
) -> List[Vector]:
    """Sample of Y(x̄) widened by near-maximizer probes along -u and +-e_i"""
    lo, hi = inst.objective.subdifferential_box(x_bar)
    u_mid = 0.5 * (lo + hi)
    n = inst.dimension
    directions = [-u_mid] + [s * e for e in np.eye(n) for s in (1.0, -1.0)]
    points = list(argmax_set(inst, x_bar, tol, config))
    points.append(x_bar)
    points.extend(probe_near_maximizers(inst, x_bar, directions, tol, config))
    return dedupe(points)


def fit_multipliers(inst: ProblemInstance, x_bar: Vector, points: List[Vector]) -> MultiplierFit:
    """
    Bounded least squares over lambda >= 0, nu >= 0 and u in the box df(x̄):

        min || lo + delta + sum lambda_i F(y_i) + G nu ||,   0 <= delta <= hi - lo

    with G the normal-cone generators at x̄. The support is then pivoted down
    to at most n+1 points.
    """
    n = inst.dimension
    lo, hi = inst.objective.subdifferential_box(x_bar)
    width = hi - lo
    free = np.flatnonzero(width > 0)

    Fy = np.array([inst.map(y) for y in points]).T.reshape(n, -1)
    G = inst.set.normal_cone_generators(x_bar)
    k, p = Fy.shape[1], G.shape[1]
    A = np.hstack([Fy, G, np.eye(n)[:, free]])
    lb = np.zeros(A.shape[1])
    ub = np.concatenate([np.full(k + p, np.inf), width[free]])

    res = lsq_linear(A, -lo, bounds=(lb, ub), method="bvls", tol=1e-14, max_iter=2000)
    lam = np.maximum(res.x[:k], 0.0)
    u = lo.copy()
    u[free] += res.x[k + p :]

    if np.count_nonzero(lam) > n + 1:
        lam = reduce_weights(Fy.T, lam)

    residual = inst.set.normal_cone_residual(x_bar, -(u + Fy @ lam))
    support = np.flatnonzero(lam > 0)
    if support.size == 0:
        support = np.array([0])
    return MultiplierFit(
        points=[points[i] for i in support],
        multipliers=[float(lam[i]) for i in support],
        u=u,
        residual=residual,
    )


def kkt_certificate(
    inst: ProblemInstance,
    x_bar: ArrayLike,
    tol: float = 1e-6,
    config: Optional[GapConfig] = None,
) -> KktCertificate:
    inst, x_bar, gap = require_lower_level_solution(inst, x_bar, tol, config)

    candidates = [
        y
        for y in candidate_points(inst, x_bar, tol, config)
        if abs(inner_objective(inst, x_bar, y)) <= tol
    ]
    fit = fit_multipliers(inst, x_bar, candidates)
    complementarity = max(abs(inner_objective(inst, x_bar, y)) for y in fit.points)

    cert = KktCertificate(
        point=x_bar,
        points=fit.points,
        multipliers=fit.multipliers,
        u=fit.u,
        stationarity_residual=fit.residual,
        complementarity_residual=complementarity,
        tol=tol,
        gap=gap,
    )
    if max(fit.multipliers) > 1.0 / np.sqrt(tol):
        cert.notes.append(
            "multipliers are of order tol^(-1/2): an approximate certificate where the "
            "normal-cone closedness condition fails"
        )
    if cert.certified:
        logger.info(f"KKT certificate PASSED at {x_bar.tolist()}")
    else:
        logger.warning(
            f"KKT certificate FAILED at {x_bar.tolist()}: "
            f"r_s={cert.stationarity_residual:.3e}, r_c={cert.complementarity_residual:.3e}"
        )
    return cert
