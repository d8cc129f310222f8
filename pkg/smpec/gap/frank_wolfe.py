"""
Frank-Wolfe maximization of the concave quadratic inner problem of g_D.

For F(y) = My + q the inner objective at x is

    phi(y) = <My + q, x - y>,   grad phi(y) = M^T (x - y) - (My + q),

whose quadratic part is -y^T S y with S = (M + M^T)/2 PSD, so the exact line
search along d has the closed form gamma* = <grad, d> / (2 d^T S d).
Polyhedral sets use away steps over an active set of LMO vertices.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..errors import InnerNonConvergence
from ..model.sets import ConvexSet
from ..model.types import Matrix, Vector

logger = logging.getLogger(__name__)

CURVATURE_EPS = 1e-18
DROP_WEIGHT = 1e-12


@dataclass
class FrankWolfeResult:
    y: Vector
    value: float
    fw_gap: float
    iterations: int
    atoms: List[Vector] = field(default_factory=list)
    weights: List[float] = field(default_factory=list)


def _key(v: Vector) -> Tuple[float, ...]:
    return tuple(v.tolist())


def maximize_inner_quadratic(
    x: Vector,
    M: Matrix,
    q: Vector,
    cset: ConvexSet,
    tol: float = 1e-8,
    max_iter: int = 100000,
) -> FrankWolfeResult:
    """Maximize phi over C until the Frank-Wolfe gap drops to tol"""
    S = 0.5 * (M + M.T)
    Mt_x = M.T @ x

    def grad(y: Vector) -> Vector:
        return Mt_x - M.T @ y - (M @ y + q)

    def phi(y: Vector) -> float:
        return float((M @ y + q) @ (x - y))

    # interior stationary point: grad phi = 0 solves the problem outright
    rhs = Mt_x - q
    y_stat = np.linalg.lstsq(2.0 * S, rhs, rcond=None)[0]
    if np.linalg.norm(2.0 * S @ y_stat - rhs) <= 1e-12 * (1.0 + np.linalg.norm(rhs)) and (
        cset.contains(y_stat)
    ):
        g = grad(y_stat)
        gap = float(g @ (cset.vertex_oracle(-g) - y_stat))
        if gap <= tol:
            return FrankWolfeResult(
                y=y_stat,
                value=phi(y_stat),
                fw_gap=max(gap, 0.0),
                iterations=0,
                atoms=[y_stat],
                weights=[1.0],
            )

    away = cset.polyhedral
    y = cset.vertex_oracle(-grad(cset.center()))
    atoms: Dict[Tuple[float, ...], List] = {_key(y): [y, 1.0]}

    fw_gap = np.inf
    for it in range(max_iter):
        g = grad(y)
        s = cset.vertex_oracle(-g)
        fw_gap = float(g @ (s - y))
        if fw_gap <= tol:
            return FrankWolfeResult(
                y=y,
                value=phi(y),
                fw_gap=max(fw_gap, 0.0),
                iterations=it,
                atoms=[a for a, _ in atoms.values()],
                weights=[w for _, w in atoms.values()],
            )

        use_away = False
        if away and len(atoms) > 1:
            a_key = min(atoms, key=lambda k: float(g @ atoms[k][0]))
            a, w_a = atoms[a_key]
            away_gap = float(g @ (y - a))
            use_away = away_gap > fw_gap

        if use_away:
            d = y - a
            gamma_max = w_a / (1.0 - w_a)
        else:
            d = s - y
            gamma_max = 1.0

        curvature = float(d @ S @ d)
        slope = float(g @ d)
        if curvature <= CURVATURE_EPS:
            gamma = gamma_max
        else:
            gamma = min(gamma_max, slope / (2.0 * curvature))
        y = y + gamma * d

        if not away:
            continue
        if use_away:
            for entry in atoms.values():
                entry[1] *= 1.0 + gamma
            atoms[a_key][1] -= gamma
            if atoms[a_key][1] <= DROP_WEIGHT or gamma == gamma_max:
                del atoms[a_key]
        elif gamma >= 1.0:
            atoms = {_key(s): [s, 1.0]}
            y = s
        else:
            for entry in atoms.values():
                entry[1] *= 1.0 - gamma
            s_key = _key(s)
            if s_key in atoms:
                atoms[s_key][1] += gamma
            else:
                atoms[s_key] = [s, gamma]

    raise InnerNonConvergence(
        f"Frank-Wolfe did not reach gap {tol:g} within {max_iter} iterations",
        iterations=max_iter,
        fw_gap=fw_gap,
    )
