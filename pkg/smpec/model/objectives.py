"""
Convex upper-level objectives f with value, subgradient and subdifferential-box oracles.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .types import ArrayLike, Vector, as_vector, frozen

KINK_TOL = 1e-12


class ObjectiveKind(str, Enum):
    QUADRATIC_DISTANCE = "quadratic-distance"
    SQUARED_NORM = "squared-norm"
    L1_NORM = "l1-norm"
    LINEAR = "linear"
    WEIGHTED_SUM = "weighted-sum"


@dataclass(frozen=True, eq=False)
class ConvexObjective:
    kind: ObjectiveKind
    dimension: int
    anchor: Optional[Vector] = None
    c: Optional[Vector] = None
    terms: Tuple[Tuple[float, "ConvexObjective"], ...] = ()

    @classmethod
    def quadratic_distance(cls, anchor: ArrayLike) -> "ConvexObjective":
        a = as_vector(anchor)
        return cls(ObjectiveKind.QUADRATIC_DISTANCE, a.shape[0], anchor=frozen(a))

    @classmethod
    def squared_norm(cls, dimension: int) -> "ConvexObjective":
        return cls(ObjectiveKind.SQUARED_NORM, dimension)

    @classmethod
    def l1_norm(cls, dimension: int) -> "ConvexObjective":
        return cls(ObjectiveKind.L1_NORM, dimension)

    @classmethod
    def linear(cls, c: ArrayLike) -> "ConvexObjective":
        c = as_vector(c)
        return cls(ObjectiveKind.LINEAR, c.shape[0], c=frozen(c))

    @classmethod
    def weighted_sum(cls, terms) -> "ConvexObjective":
        terms = tuple((float(w), f) for w, f in terms)
        if not terms:
            raise ValueError("weighted-sum needs at least one term")
        if any(w < 0 for w, _ in terms):
            raise ValueError("weighted-sum weights must be nonnegative")
        return cls(ObjectiveKind.WEIGHTED_SUM, terms[0][1].dimension, terms=terms)

    @property
    def is_smooth(self) -> bool:
        if self.kind == ObjectiveKind.L1_NORM:
            return False
        if self.kind == ObjectiveKind.WEIGHTED_SUM:
            return all(w == 0 or f.is_smooth for w, f in self.terms)
        return True

    def value(self, x: ArrayLike) -> float:
        x = np.asarray(x, dtype=np.float64)
        kind = self.kind
        if kind == ObjectiveKind.QUADRATIC_DISTANCE:
            d = x - self.anchor
            return 0.5 * float(d @ d)
        if kind == ObjectiveKind.SQUARED_NORM:
            return float(x @ x)
        if kind == ObjectiveKind.L1_NORM:
            return float(np.abs(x).sum())
        if kind == ObjectiveKind.LINEAR:
            return float(self.c @ x)
        return float(sum(w * f.value(x) for w, f in self.terms))

    __call__ = value

    def subgradient(self, x: ArrayLike) -> Vector:
        """One element of the subdifferential; sign(x) with 0 at kinks for l1"""
        x = np.asarray(x, dtype=np.float64)
        kind = self.kind
        if kind == ObjectiveKind.QUADRATIC_DISTANCE:
            return x - self.anchor
        if kind == ObjectiveKind.SQUARED_NORM:
            return 2.0 * x
        if kind == ObjectiveKind.L1_NORM:
            return np.sign(x)
        if kind == ObjectiveKind.LINEAR:
            return np.array(self.c)
        return sum(w * f.subgradient(x) for w, f in self.terms)

    def subdifferential_box(self, x: ArrayLike, tol: float = KINK_TOL) -> Tuple[Vector, Vector]:
        """
        The full subdifferential as a coordinate box [lo, hi].

        Exact for every variant: smooth terms contribute a point, l1 contributes
        [-1, 1] at zero coordinates, weighted sums add boxes coordinatewise.
        """
        x = np.asarray(x, dtype=np.float64)
        if self.kind == ObjectiveKind.L1_NORM:
            kink = np.abs(x) <= tol
            s = np.sign(x)
            return np.where(kink, -1.0, s), np.where(kink, 1.0, s)
        if self.kind == ObjectiveKind.WEIGHTED_SUM:
            lo = np.zeros(self.dimension)
            hi = np.zeros(self.dimension)
            for w, f in self.terms:
                f_lo, f_hi = f.subdifferential_box(x, tol)
                lo += w * f_lo
                hi += w * f_hi
            return lo, hi
        g = self.subgradient(x)
        return g, g.copy()

    def shape_errors(self) -> Dict[str, str]:
        errors = {}
        if self.kind == ObjectiveKind.WEIGHTED_SUM:
            for i, (_, f) in enumerate(self.terms):
                if f.dimension != self.dimension:
                    errors[f"terms[{i}]"] = (
                        f"expected dimension {self.dimension}, got {f.dimension}"
                    )
        return errors

    def to_dict(self) -> Dict[str, Any]:
        kind = self.kind
        if kind == ObjectiveKind.QUADRATIC_DISTANCE:
            params = {"anchor": self.anchor.tolist()}
        elif kind == ObjectiveKind.LINEAR:
            params = {"c": self.c.tolist()}
        elif kind == ObjectiveKind.WEIGHTED_SUM:
            params = {
                "terms": [{"weight": w, **f.to_dict()} for w, f in self.terms]
            }
        else:
            params = {}
        return {"variant": kind.value, "params": params}


def subdifferential_box(objective: ConvexObjective, x: ArrayLike) -> Tuple[Vector, Vector]:
    return objective.subdifferential_box(as_vector(x, objective.dimension))
