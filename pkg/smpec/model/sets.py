"""
Feasible convex sets C with projection, linear-minimization and normal-cone oracles.

Every variant is immutable once built. Polytopes certify their own boundedness
(and cache a bounding box) with one pair of LPs per coordinate.
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import Bounds, linprog, nnls

from ..errors import (
    PointNotInSet,
    ProjectionNonConvergence,
    UnboundedSet,
    ValidationError,
)
from .types import ArrayLike, Matrix, Vector, as_matrix, as_vector, frozen

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-10
ACTIVE_TOL = 1e-9
DYKSTRA_MAX_SWEEPS = 50000


class SetKind(str, Enum):
    BOX = "box"
    BALL = "ball"
    POLYTOPE = "polytope"
    SIMPLEX = "simplex"


class ConvexSet(ABC):
    """Closed convex subset of R^n"""

    kind: SetKind
    polyhedral: bool = True

    def __init__(self, dimension: int):
        self.dimension = int(dimension)

    # Oracles

    @abstractmethod
    def project(self, z: ArrayLike) -> Vector:
        """Euclidean projection onto C"""

    @abstractmethod
    def linear_minimizer(self, c: ArrayLike) -> Vector:
        """argmin over C of <c, y>, lexicographically smallest among ties"""

    @abstractmethod
    def violation(self, x: ArrayLike) -> float:
        """0 for points of C, otherwise a nonnegative infeasibility measure"""

    @abstractmethod
    def normal_cone_generators(self, x: Vector, tol: float = ACTIVE_TOL) -> Matrix:
        """Columns generate N_C(x) as a convex cone"""

    @abstractmethod
    def sample_points(self, k: int, rng: np.random.Generator) -> Matrix:
        """k points of C as the rows of a (k, n) array"""

    @abstractmethod
    def center(self) -> Vector:
        """A fixed point of C used as the default starting point"""

    @abstractmethod
    def bounding_box(self) -> Tuple[Vector, Vector]:
        """Finite coordinate bounds enclosing C"""

    @abstractmethod
    def scipy_constraints(self) -> Tuple[Optional[Bounds], List[Dict[str, Any]]]:
        """Bounds and SLSQP-style constraint dicts describing C"""

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """Instance-file parameters"""

    # Shared behaviour

    @property
    def is_bounded(self) -> bool:
        return True

    def require_bounded(self) -> None:
        if not self.is_bounded:
            raise UnboundedSet(f"{self.kind.value} set is unbounded")

    def vertex_oracle(self, c: ArrayLike) -> Vector:
        """Linear minimizer without the tie-break, for inner loops"""
        return self.linear_minimizer(c)

    def contains(self, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.violation(x) <= tol

    def require_member(self, x: ArrayLike, tol: float = MEMBERSHIP_TOL) -> Vector:
        x = as_vector(x, self.dimension)
        viol = self.violation(x)
        if viol > tol:
            raise PointNotInSet(
                f"point lies outside the {self.kind.value} set (violation {viol:.3e})",
                violation=viol,
            )
        return x

    def diameter(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(hi - lo))

    def normal_cone_residual(self, x: ArrayLike, v: ArrayLike) -> float:
        """Distance from v to N_C(x)"""
        x = self.require_member(x)
        v = as_vector(v, self.dimension)
        G = self.normal_cone_generators(x)
        return cone_distance(G, v)

    def touches_wrap(self, x: ArrayLike, tol: float = ACTIVE_TOL) -> bool:
        """True when x sits on a face added by wrap_unbounded"""
        return False

    def to_dict(self) -> Dict[str, Any]:
        return {"variant": self.kind.value, "params": self.params()}

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dimension={self.dimension})"


def cone_distance(G: Matrix, v: Vector) -> float:
    """min over beta >= 0 of ||G beta - v||; G has the generators as columns"""
    if G.shape[1] == 0:
        return float(np.linalg.norm(v))
    _, residual = nnls(G, v)
    return float(residual)


class Box(ConvexSet):
    """{x : lower <= x <= upper}; bounds may be infinite until wrapped"""

    kind = SetKind.BOX

    def __init__(
        self,
        lower: ArrayLike,
        upper: ArrayLike,
        unbounded_lower: Optional[ArrayLike] = None,
        unbounded_upper: Optional[ArrayLike] = None,
    ):
        lower = as_vector(lower)
        upper = as_vector(upper, lower.shape[0])
        super().__init__(lower.shape[0])
        self.lower = frozen(lower)
        self.upper = frozen(upper)
        n = self.dimension
        self.unbounded_lower = np.zeros(n, bool) if unbounded_lower is None else (
            np.asarray(unbounded_lower, bool)
        )
        self.unbounded_upper = np.zeros(n, bool) if unbounded_upper is None else (
            np.asarray(unbounded_upper, bool)
        )

    @property
    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    def project(self, z: ArrayLike) -> Vector:
        return np.clip(as_vector(z, self.dimension), self.lower, self.upper)

    def linear_minimizer(self, c: ArrayLike) -> Vector:
        self.require_bounded()
        c = as_vector(c, self.dimension)
        return np.where(c < 0, self.upper, self.lower).astype(np.float64)

    def violation(self, x: ArrayLike) -> float:
        x = as_vector(x, self.dimension)
        return float(max(np.max(self.lower - x), np.max(x - self.upper), 0.0))

    def normal_cone_generators(self, x: Vector, tol: float = ACTIVE_TOL) -> Matrix:
        cols = []
        eye = np.eye(self.dimension)
        for i in range(self.dimension):
            if x[i] >= self.upper[i] - tol:
                cols.append(eye[i])
            if x[i] <= self.lower[i] + tol:
                cols.append(-eye[i])
        return np.array(cols, dtype=np.float64).reshape(-1, self.dimension).T

    def normal_cone_residual(self, x: ArrayLike, v: ArrayLike) -> float:
        x = self.require_member(x)
        v = as_vector(v, self.dimension)
        at_upper = x >= self.upper - ACTIVE_TOL
        at_lower = x <= self.lower + ACTIVE_TOL
        # per coordinate: R if both bounds active, R+ at upper, R- at lower, {0} otherwise
        comp = np.where(
            at_upper & at_lower,
            0.0,
            np.where(
                at_upper,
                np.maximum(-v, 0.0),
                np.where(at_lower, np.maximum(v, 0.0), np.abs(v)),
            ),
        )
        return float(np.linalg.norm(comp))

    def sample_points(self, k: int, rng: np.random.Generator) -> Matrix:
        self.require_bounded()
        return rng.uniform(self.lower, self.upper, size=(k, self.dimension))

    def center(self) -> Vector:
        self.require_bounded()
        return 0.5 * (self.lower + self.upper)

    def bounding_box(self) -> Tuple[Vector, Vector]:
        self.require_bounded()
        return np.array(self.lower), np.array(self.upper)

    def scipy_constraints(self) -> Tuple[Optional[Bounds], List[Dict[str, Any]]]:
        return Bounds(self.lower, self.upper), []

    def touches_wrap(self, x: ArrayLike, tol: float = ACTIVE_TOL) -> bool:
        x = as_vector(x, self.dimension)
        hit_upper = self.unbounded_upper & (x >= self.upper - tol)
        hit_lower = self.unbounded_lower & (x <= self.lower + tol)
        return bool(np.any(hit_upper | hit_lower))

    def params(self) -> Dict[str, Any]:
        lower = np.where(self.unbounded_lower, -np.inf, self.lower)
        upper = np.where(self.unbounded_upper, np.inf, self.upper)
        return {"lower": lower.tolist(), "upper": upper.tolist()}


class Ball(ConvexSet):
    """{x : ||x - center|| <= radius}"""

    kind = SetKind.BALL
    polyhedral = False

    def __init__(self, center: ArrayLike, radius: float):
        c = as_vector(center)
        super().__init__(c.shape[0])
        if not radius > 0:
            raise ValidationError(f"ball radius must be positive, got {radius}")
        self._center = frozen(c)
        self.radius = float(radius)

    def project(self, z: ArrayLike) -> Vector:
        z = as_vector(z, self.dimension)
        d = z - self._center
        nrm = np.linalg.norm(d)
        if nrm <= self.radius:
            return z
        return self._center + (self.radius / nrm) * d

    def linear_minimizer(self, c: ArrayLike) -> Vector:
        c = as_vector(c, self.dimension)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            e1 = np.zeros(self.dimension)
            e1[0] = 1.0
            return self._center - self.radius * e1
        return self._center - (self.radius / nrm) * c

    def violation(self, x: ArrayLike) -> float:
        x = as_vector(x, self.dimension)
        return float(max(np.linalg.norm(x - self._center) - self.radius, 0.0))

    def _on_sphere(self, x: Vector, tol: float) -> bool:
        return np.linalg.norm(x - self._center) >= self.radius - tol

    def normal_cone_generators(self, x: Vector, tol: float = ACTIVE_TOL) -> Matrix:
        if self._on_sphere(x, tol):
            return (x - self._center).reshape(-1, 1)
        return np.zeros((self.dimension, 0))

    def normal_cone_residual(self, x: ArrayLike, v: ArrayLike) -> float:
        x = self.require_member(x)
        v = as_vector(v, self.dimension)
        if not self._on_sphere(x, ACTIVE_TOL):
            return float(np.linalg.norm(v))
        d = x - self._center
        t = max(0.0, float(v @ d) / float(d @ d))
        return float(np.linalg.norm(v - t * d))

    def sample_points(self, k: int, rng: np.random.Generator) -> Matrix:
        n = self.dimension
        g = rng.standard_normal((k, n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.uniform(0.0, 1.0, size=(k, 1)) ** (1.0 / n)
        return self._center + r * g

    def center(self) -> Vector:
        return np.array(self._center)

    def bounding_box(self) -> Tuple[Vector, Vector]:
        return self._center - self.radius, self._center + self.radius

    def diameter(self) -> float:
        return 2.0 * self.radius

    def scipy_constraints(self) -> Tuple[Optional[Bounds], List[Dict[str, Any]]]:
        c, r = self._center, self.radius
        return Bounds(c - r, c + r), [
            {
                "type": "ineq",
                "fun": lambda y: r * r - float((y - c) @ (y - c)),
                "jac": lambda y: -2.0 * (y - c),
            }
        ]

    def params(self) -> Dict[str, Any]:
        return {"center": self._center.tolist(), "radius": self.radius}


class Simplex(ConvexSet):
    """{x >= 0 : sum(x) = scale}"""

    kind = SetKind.SIMPLEX

    def __init__(self, dimension: int, scale: float = 1.0):
        super().__init__(dimension)
        if not scale > 0:
            raise ValidationError(f"simplex scale must be positive, got {scale}")
        self.scale = float(scale)

    def project(self, z: ArrayLike) -> Vector:
        z = as_vector(z, self.dimension)
        z_decr = np.sort(z)[::-1]
        z_cumsum = np.cumsum(z_decr)
        denom = np.arange(1, z_decr.size + 1)
        theta = (z_cumsum - self.scale) / denom
        idx = np.max(np.argwhere(z_decr - theta > 0).ravel())
        return np.maximum(z - theta[idx], 0.0)

    def linear_minimizer(self, c: ArrayLike) -> Vector:
        c = as_vector(c, self.dimension)
        ties = np.flatnonzero(c == c.min())
        # scale * e_i with the largest tied i is the lexicographically smallest
        y = np.zeros(self.dimension)
        y[ties[-1]] = self.scale
        return y

    def violation(self, x: ArrayLike) -> float:
        x = as_vector(x, self.dimension)
        return float(max(np.max(-x), abs(x.sum() - self.scale), 0.0))

    def normal_cone_generators(self, x: Vector, tol: float = ACTIVE_TOL) -> Matrix:
        n = self.dimension
        ones = np.ones(n)
        cols = [ones, -ones]
        eye = np.eye(n)
        cols.extend(-eye[i] for i in range(n) if x[i] <= tol)
        return np.array(cols).T

    def sample_points(self, k: int, rng: np.random.Generator) -> Matrix:
        return self.scale * rng.dirichlet(np.ones(self.dimension), size=k)

    def center(self) -> Vector:
        return np.full(self.dimension, self.scale / self.dimension)

    def bounding_box(self) -> Tuple[Vector, Vector]:
        return np.zeros(self.dimension), np.full(self.dimension, self.scale)

    def diameter(self) -> float:
        return self.scale * np.sqrt(2.0) if self.dimension > 1 else 0.0

    def scipy_constraints(self) -> Tuple[Optional[Bounds], List[Dict[str, Any]]]:
        s, n = self.scale, self.dimension
        return Bounds(np.zeros(n), np.full(n, s)), [
            {"type": "eq", "fun": lambda y: float(y.sum() - s), "jac": lambda y: np.ones(n)}
        ]

    def params(self) -> Dict[str, Any]:
        return {"scale": self.scale}


class Polytope(ConvexSet):
    """{x : Ax <= b}"""

    kind = SetKind.POLYTOPE

    def __init__(self, A: ArrayLike, b: ArrayLike, wrap_rows: int = 0):
        A = as_matrix(A)
        b = as_vector(b)
        super().__init__(A.shape[1])
        if b.shape[0] != A.shape[0]:
            raise ValidationError(
                f"polytope has {A.shape[0]} rows in A but {b.shape[0]} entries in b"
            )
        self.A = frozen(A)
        self.b = frozen(b)
        self.wrap_rows = int(wrap_rows)
        self._row_norms_sq = np.einsum("ij,ij->i", A, A)

    @cached_property
    def _bounds(self) -> Optional[Tuple[Vector, Vector]]:
        n = self.dimension
        lo, hi = np.empty(n), np.empty(n)
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            for sign, out in ((1.0, lo), (-1.0, hi)):
                res = linprog(
                    sign * e, A_ub=self.A, b_ub=self.b, bounds=(None, None), method="highs"
                )
                if res.status == 2:
                    raise ValidationError("polytope is empty")
                if res.status == 3:
                    logger.debug(f"Polytope unbounded along coordinate {j}")
                    return None
                out[j] = sign * res.fun
        return lo, hi

    @property
    def is_bounded(self) -> bool:
        """The certified-bounded flag: per-coordinate LPs all finite"""
        return self._bounds is not None

    def project(self, z: ArrayLike) -> Vector:
        z = as_vector(z, self.dimension)
        if self.violation(z) <= 0.0:
            return z
        # Dykstra's alternating projections over the halfspaces
        m = self.A.shape[0]
        x = z.copy()
        incr = np.zeros((m, self.dimension))
        for sweep in range(DYKSTRA_MAX_SWEEPS):
            x_prev = x.copy()
            for i in range(m):
                y = x + incr[i]
                excess = self.A[i] @ y - self.b[i]
                x = y - (max(excess, 0.0) / self._row_norms_sq[i]) * self.A[i]
                incr[i] = y - x
            if self.violation(x) <= MEMBERSHIP_TOL and np.linalg.norm(x - x_prev) <= 1e-13:
                return x
        residual = self.violation(x)
        raise ProjectionNonConvergence(
            f"Dykstra projection did not converge after {DYKSTRA_MAX_SWEEPS} sweeps",
            iterations=DYKSTRA_MAX_SWEEPS,
            residual=residual,
        )

    def _solve_lp(self, c: Vector, A_ub: Matrix, b_ub: Vector) -> Tuple[Vector, float]:
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(None, None), method="highs")
        if res.status == 3:
            raise UnboundedSet("polytope is unbounded in the requested direction")
        if res.status != 0:
            raise ValidationError(f"linear program failed: {res.message}")
        return res.x, float(res.fun)

    def linear_minimizer(self, c: ArrayLike, lexicographic: bool = True) -> Vector:
        self.require_bounded()
        c = as_vector(c, self.dimension)
        y, opt = self._solve_lp(c, self.A, self.b)
        if lexicographic:
            A_ub = np.vstack([self.A, c])
            b_ub = np.append(self.b, opt + 1e-10 * (1.0 + abs(opt)))
            for j in range(self.dimension):
                e = np.zeros(self.dimension)
                e[j] = 1.0
                y, val = self._solve_lp(e, A_ub, b_ub)
                A_ub = np.vstack([A_ub, e])
                b_ub = np.append(b_ub, val + 1e-10 * (1.0 + abs(val)))
        if self.violation(y) > MEMBERSHIP_TOL:
            y = self.project(y)
        return y

    def vertex_oracle(self, c: ArrayLike) -> Vector:
        return self.linear_minimizer(c, lexicographic=False)

    def violation(self, x: ArrayLike) -> float:
        x = as_vector(x, self.dimension)
        return float(max(np.max(self.A @ x - self.b), 0.0))

    def active_rows(self, x: Vector, tol: float = ACTIVE_TOL) -> np.ndarray:
        return np.flatnonzero(self.A @ x >= self.b - tol)

    def normal_cone_generators(self, x: Vector, tol: float = ACTIVE_TOL) -> Matrix:
        return self.A[self.active_rows(x, tol)].T.reshape(self.dimension, -1)

    def _spread_vertices(self, rng: Optional[np.random.Generator] = None) -> Matrix:
        n = self.dimension
        dirs = [s * e for e in np.eye(n) for s in (1.0, -1.0)]
        if rng is not None:
            dirs.extend(rng.standard_normal((n + 1, n)))
        return np.array([self.linear_minimizer(d, lexicographic=False) for d in dirs])

    def sample_points(self, k: int, rng: np.random.Generator) -> Matrix:
        self.require_bounded()
        V = self._spread_vertices(rng)
        weights = rng.dirichlet(np.ones(V.shape[0]), size=k)
        return weights @ V

    def center(self) -> Vector:
        self.require_bounded()
        return self._spread_vertices().mean(axis=0)

    def bounding_box(self) -> Tuple[Vector, Vector]:
        self.require_bounded()
        lo, hi = self._bounds
        return lo.copy(), hi.copy()

    def scipy_constraints(self) -> Tuple[Optional[Bounds], List[Dict[str, Any]]]:
        A, b = self.A, self.b
        lo, hi = self.bounding_box()
        return Bounds(lo, hi), [
            {"type": "ineq", "fun": lambda y: b - A @ y, "jac": lambda y: -A}
        ]

    def touches_wrap(self, x: ArrayLike, tol: float = ACTIVE_TOL) -> bool:
        if self.wrap_rows == 0:
            return False
        first = self.A.shape[0] - self.wrap_rows
        return bool(np.any(self.active_rows(as_vector(x), tol) >= first))

    def params(self) -> Dict[str, Any]:
        keep = self.A.shape[0] - self.wrap_rows
        return {"A": self.A[:keep].tolist(), "b": self.b[:keep].tolist()}


def wrap_unbounded(cset: ConvexSet, radius: float) -> ConvexSet:
    """Intersect an unbounded set with the box [-R, R]^n; bounded sets pass through"""
    if cset.is_bounded:
        return cset
    n = cset.dimension
    logger.info(f"Wrapping unbounded {cset.kind.value} set in the box [-{radius}, {radius}]^{n}")
    if isinstance(cset, Box):
        return Box(
            np.where(np.isfinite(cset.lower), cset.lower, -float(radius)),
            np.where(np.isfinite(cset.upper), cset.upper, float(radius)),
            unbounded_lower=~np.isfinite(cset.lower),
            unbounded_upper=~np.isfinite(cset.upper),
        )
    if isinstance(cset, Polytope):
        keep = cset.A.shape[0] - cset.wrap_rows
        eye = np.eye(n)
        return Polytope(
            np.vstack([cset.A[:keep], eye, -eye]),
            np.concatenate([cset.b[:keep], np.full(2 * n, float(radius))]),
            wrap_rows=2 * n,
        )
    raise UnboundedSet(f"cannot wrap a {cset.kind.value} set")


def build_set(variant: str, params: Dict[str, Any], dimension: int) -> ConvexSet:
    """Construct a set from its instance-file variant tag and parameters"""
    kind = SetKind(variant)
    if kind == SetKind.BOX:
        return Box(params["lower"], params["upper"])
    if kind == SetKind.BALL:
        return Ball(params["center"], params["radius"])
    if kind == SetKind.SIMPLEX:
        return Simplex(dimension, float(params.get("scale", 1.0)))
    return Polytope(params["A"], params["b"])


# Functional forms of the oracles


def project(cset: ConvexSet, z: ArrayLike) -> Vector:
    return cset.project(z)


def linear_minimizer(cset: ConvexSet, c: ArrayLike) -> Vector:
    return cset.linear_minimizer(c)


def normal_cone_residual(cset: ConvexSet, x: ArrayLike, v: ArrayLike) -> float:
    return cset.normal_cone_residual(x, v)


def sample_points(cset: ConvexSet, k: int, rng: np.random.Generator) -> Matrix:
    return cset.sample_points(k, rng)
