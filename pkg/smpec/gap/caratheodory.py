"""
Caratheodory reduction: write a point of a convex hull with at most n+1 generators.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
from scipy.optimize import linprog, nnls

from ..errors import TargetNotInHull
from ..model.types import ArrayLike, Vector, as_vector

logger = logging.getLogger(__name__)

HULL_TOL = 1e-9


@dataclass
class ConvexCombination:
    points: List[Vector]
    weights: List[float]

    def combine(self) -> Vector:
        return sum(w * p for w, p in zip(self.weights, self.points))

    def to_dict(self) -> dict:
        return {
            "points": [p.tolist() for p in self.points],
            "weights": [float(w) for w in self.weights],
        }


def hull_weights(points: np.ndarray, target: Vector) -> np.ndarray:
    """
    Nonnegative weights summing to 1 reproducing target, or raise.

    Solves the hull LP (a basic solution); falls back to least squares with an
    appended row of ones when the LP reports numerical trouble.
    """
    k = points.shape[0]
    A_eq = np.vstack([points.T, np.ones((1, k))])
    b_eq = np.append(target, 1.0)
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 0:
        w = res.x
    else:
        w, _ = nnls(A_eq, b_eq)
    residual = float(np.linalg.norm(A_eq @ w - b_eq))
    if residual > HULL_TOL * (1.0 + np.linalg.norm(target)):
        w, _ = nnls(A_eq, b_eq)
        residual = float(np.linalg.norm(A_eq @ w - b_eq))
        if residual > HULL_TOL * (1.0 + np.linalg.norm(target)):
            raise TargetNotInHull(
                f"target is not in the convex hull (residual {residual:.3e})",
                residual=residual,
            )
    return w


def _pivot_out(P: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Remove one support point using an affine dependence of the support"""
    support = np.flatnonzero(w > 0)
    A = np.vstack([P[support].T, np.ones((1, support.size))])
    # null vector of A: last right singular vector
    _, _, vt = np.linalg.svd(A)
    z = vt[-1]
    if not np.any(z > 0):
        z = -z
    pos = z > 0
    ratios = w[support][pos] / z[pos]
    t = ratios.min()
    w_new = w.copy()
    w_new[support] = w[support] - t * z
    w_new[support[pos][np.argmin(ratios)]] = 0.0
    return np.maximum(w_new, 0.0)


def reduce_weights(P: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Pivot support points out until at most n+1 carry weight; the combination is kept"""
    w = np.where(w <= 1e-15, 0.0, w)
    while np.count_nonzero(w) > P.shape[1] + 1:
        w = _pivot_out(P, w)
    return w


def caratheodory_reduce(points: Sequence[ArrayLike], target: ArrayLike) -> ConvexCombination:
    P = np.array([as_vector(p) for p in points])
    target = as_vector(target, P.shape[1])

    w = reduce_weights(P, hull_weights(P, target))

    support = np.flatnonzero(w > 0)
    if support.size == 0:
        raise TargetNotInHull("empty support after reduction", residual=float("inf"))
    weights = w[support] / w[support].sum()
    combo = ConvexCombination(points=[P[i] for i in support], weights=weights.tolist())
    residual = float(np.linalg.norm(combo.combine() - target))
    if residual > HULL_TOL * (1.0 + np.linalg.norm(target)):
        raise TargetNotInHull(
            f"reduced combination misses the target by {residual:.3e}", residual=residual
        )
    return combo
