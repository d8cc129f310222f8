"""
Dual gap function g_D(x) = sup_{y in C} <F(y), x - y>, its near-maximizer sets
and Danskin subgradients.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..config import GapConfig
from ..model.instance import ProblemInstance, ensure_validated
from ..model.sets import ConvexSet
from ..model.types import ArrayLike, Vector, as_vector
from .frank_wolfe import maximize_inner_quadratic

logger = logging.getLogger(__name__)

DEDUP_DIST = 1e-6
FD_STEP = 1e-6
ASCENT_MAX_ITER = 500


@dataclass
class GapEvaluation:
    value: float
    maximizers: List[Vector]
    subgradient: Vector
    inner_iterations: int
    certified: bool
    fw_gap: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "maximizers": [y.tolist() for y in self.maximizers],
            "subgradient": self.subgradient.tolist(),
            "inner_iterations": self.inner_iterations,
            "certified": self.certified,
            "fw_gap": self.fw_gap,
        }


def inner_objective(inst: ProblemInstance, x: Vector, y: Vector) -> float:
    """<F(y), x - y>"""
    return float(inst.map(y) @ (x - y))


def dedupe(points: Iterable[Vector], dist: float = DEDUP_DIST) -> List[Vector]:
    kept: List[Vector] = []
    for p in points:
        if all(np.linalg.norm(p - k) > dist for k in kept):
            kept.append(p)
    return kept


def _fd_gradient(fun, y: Vector) -> Vector:
    g = np.empty_like(y)
    for i in range(y.shape[0]):
        e = np.zeros_like(y)
        e[i] = FD_STEP
        g[i] = (fun(y + e) - fun(y - e)) / (2.0 * FD_STEP)
    return g


def _projected_ascent(fun, cset: ConvexSet, start: Vector, step0: float):
    """Armijo projected gradient ascent with finite-difference gradients"""
    y = cset.project(start)
    val = fun(y)
    step = step0
    it = 0
    for it in range(1, ASCENT_MAX_ITER + 1):
        g = _fd_gradient(fun, y)
        if not np.any(g):
            break
        while step > 1e-12:
            y_new = cset.project(y + step * g)
            v_new = fun(y_new)
            if v_new >= val + 1e-4 * float(g @ (y_new - y)):
                break
            step *= 0.5
        else:
            break
        moved = np.linalg.norm(y_new - y)
        y, val = y_new, v_new
        step = min(2.0 * step, step0)
        if moved <= 1e-10:
            break
    return y, val, it


def _multistart(inst: ProblemInstance, x: Vector, cfg: GapConfig):
    rng = np.random.default_rng(cfg.seed)
    starts = np.vstack([inst.set.sample_points(cfg.multistart - 1, rng), x])
    step0 = max(inst.set.diameter(), 1e-8) * 0.1

    def fun(y):
        return inner_objective(inst, x, y)

    limits = []
    total = 0
    for start in starts:
        y, val, its = _projected_ascent(fun, inst.set, start, step0)
        limits.append((val, y))
        total += its
    limits.sort(key=lambda t: -t[0])
    return limits, total


def eval_gap(
    inst: ProblemInstance, x: ArrayLike, config: Optional[GapConfig] = None
) -> GapEvaluation:
    """Evaluate g_D at x together with near-maximizers and a Danskin subgradient"""
    cfg = config or GapConfig()
    inst = ensure_validated(inst)
    x = as_vector(x, inst.dimension)

    form = inst.map.affine_form()
    if form is not None:
        M, q = form
        res = maximize_inner_quadratic(x, M, q, inst.set, cfg.fw_tol, cfg.fw_max_iter)
        value = res.value
        candidates = [res.y] + list(res.atoms)
        iterations = res.iterations
        certified = True
        fw_gap = res.fw_gap
    else:
        limits, iterations = _multistart(inst, x, cfg)
        value = limits[0][0]
        candidates = [y for _, y in limits]
        certified = False
        fw_gap = None

    maximizers = dedupe(
        y for y in candidates if inner_objective(inst, x, y) >= value - cfg.argmax_tol
    )
    ev = GapEvaluation(
        value=float(value),
        maximizers=maximizers,
        subgradient=inst.map(maximizers[0]),
        inner_iterations=iterations,
        certified=certified,
        fw_gap=fw_gap,
    )
    logger.debug(f"g_D({x.tolist()}) = {ev.value:.6g} after {iterations} inner iterations")
    return ev


def gap_subgradient(
    inst: ProblemInstance, x: ArrayLike, config: Optional[GapConfig] = None
) -> Vector:
    """F(y*) for a maximizer y*, an element of the Danskin subdifferential"""
    return eval_gap(inst, x, config).subgradient


def _vertex_probes(cset: ConvexSet) -> List[Vector]:
    n = cset.dimension
    dirs = [s * e for e in np.eye(n) for s in (1.0, -1.0)]
    dirs.extend([np.ones(n), -np.ones(n)])
    return [cset.linear_minimizer(d) for d in dirs]


def argmax_set(
    inst: ProblemInstance,
    x: ArrayLike,
    tol: Optional[float] = None,
    config: Optional[GapConfig] = None,
) -> List[Vector]:
    """
    Finite sample of Y(x): Frank-Wolfe iterate and atoms, coordinate-direction LMO
    vertices and x itself, plus random points of C when the inner objective is
    flat over the vertices or the inner solve is uncertified. Points within tol
    of the max are kept, deduplicated at 1e-6; the first entry is y*.
    """
    cfg = config or GapConfig()
    inst = ensure_validated(inst)
    x = as_vector(x, inst.dimension)
    tol = cfg.argmax_tol if tol is None else tol
    ev = eval_gap(inst, x, cfg)

    def near_max(y: Vector) -> bool:
        return inner_objective(inst, x, y) >= ev.value - tol

    vertices = _vertex_probes(inst.set)
    candidates = list(ev.maximizers)
    if inst.set.contains(x):
        candidates.append(x)
    candidates.extend(vertices)
    if not ev.certified or all(near_max(v) for v in vertices):
        rng = np.random.default_rng(cfg.seed)
        candidates.extend(inst.set.sample_points(cfg.multistart, rng))

    sample = dedupe(y for y in candidates if near_max(y))
    if not sample:
        sample = [ev.maximizers[0]]
    return sample


def probe_near_maximizers(
    inst: ProblemInstance,
    x: ArrayLike,
    directions: Sequence[Vector],
    tol: float,
    config: Optional[GapConfig] = None,
) -> List[Vector]:
    """
    Extreme points of {F(y) : phi(y) >= g_D(x) - tol/2} along the given directions.

    For each d, maximize <F(y), d> over the near-maximizer set with SLSQP. Only
    affine maps are probed.
    """
    form = inst.map.affine_form()
    if form is None:
        return []
    cfg = config or GapConfig()
    x = as_vector(x, inst.dimension)
    M, q = form
    ev = eval_gap(inst, x, cfg)
    level = ev.value - 0.5 * tol
    start = ev.maximizers[0]

    def phi(y):
        return float((M @ y + q) @ (x - y))

    def phi_grad(y):
        return M.T @ (x - y) - (M @ y + q)

    bounds, constraints = inst.set.scipy_constraints()
    constraints = list(constraints) + [
        {"type": "ineq", "fun": lambda y: phi(y) - level, "jac": phi_grad}
    ]

    found = []
    for d in directions:
        w = M.T @ np.asarray(d, dtype=np.float64)
        if np.linalg.norm(w) <= 1e-14:
            continue
        res = minimize(
            lambda y: -float(w @ y),
            start,
            jac=lambda y: -w,
            bounds=bounds,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": 200, "ftol": 1e-14},
        )
        y = inst.set.project(res.x)
        if phi(y) >= ev.value - tol:
            found.append(y)
        else:
            logger.debug(f"Probe along {np.round(d, 6).tolist()} left the near-max set")
    return dedupe(found)


def semi_infinite_residual(inst: ProblemInstance, x: ArrayLike, ys: Sequence[ArrayLike]) -> float:
    """max_i <F(y_i), x - y_i>: a lower bound on g_D(x), <= 0 on sol(VI(F, C))"""
    x = as_vector(x, inst.dimension)
    return max(inner_objective(inst, x, as_vector(y, inst.dimension)) for y in ys)
