"""
Monotone maps F for the lower-level variational inequality VI(F, C).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from .types import ArrayLike, Matrix, Vector, as_matrix, as_vector, frozen

logger = logging.getLogger(__name__)

MONOTONICITY_TOL = 1e-8


class MapKind(str, Enum):
    AFFINE = "affine"
    GRADIENT_OF_QUADRATIC = "gradient-of-quadratic"
    BLACK_BOX = "black-box"


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """
    F : R^n -> R^n.

    affine: F(x) = Mx + q
    gradient-of-quadratic: F(x) = 2 A^T (Ax - b), i.e. M = 2A^T A, q = -2A^T b
    black-box: any deterministic callable, monotonicity only sample-checked
    """

    kind: MapKind
    dimension: int
    M: Optional[Matrix] = None
    q: Optional[Vector] = None
    A: Optional[Matrix] = None
    b: Optional[Vector] = None
    evaluator: Optional[Callable[[Vector], ArrayLike]] = field(default=None, repr=False)

    @classmethod
    def affine(cls, M: ArrayLike, q: ArrayLike) -> "MonotoneMap":
        M = as_matrix(M)
        n = M.shape[1]
        q = as_vector(q)
        return cls(kind=MapKind.AFFINE, dimension=n, M=frozen(M), q=frozen(q))

    @classmethod
    def gradient_of_quadratic(cls, A: ArrayLike, b: ArrayLike) -> "MonotoneMap":
        A = as_matrix(A)
        b = as_vector(b)
        return cls(
            kind=MapKind.GRADIENT_OF_QUADRATIC,
            dimension=A.shape[1],
            A=frozen(A),
            b=frozen(b),
        )

    @classmethod
    def black_box(
        cls, evaluator: Callable[[Vector], ArrayLike], dimension: int
    ) -> "MonotoneMap":
        return cls(kind=MapKind.BLACK_BOX, dimension=dimension, evaluator=evaluator)

    @property
    def is_affine(self) -> bool:
        return self.kind != MapKind.BLACK_BOX

    def affine_form(self) -> Optional[Tuple[Matrix, Vector]]:
        """(M, q) with F(x) = Mx + q, or None for black-box maps"""
        if self.kind == MapKind.AFFINE:
            return self.M, self.q
        if self.kind == MapKind.GRADIENT_OF_QUADRATIC:
            return 2.0 * self.A.T @ self.A, -2.0 * self.A.T @ self.b
        return None

    def __call__(self, x: ArrayLike) -> Vector:
        x = np.asarray(x, dtype=np.float64)
        if self.kind == MapKind.AFFINE:
            return self.M @ x + self.q
        if self.kind == MapKind.GRADIENT_OF_QUADRATIC:
            return 2.0 * (self.A.T @ (self.A @ x - self.b))
        return as_vector(self.evaluator(x), self.dimension)

    def symmetric_part(self) -> Optional[Matrix]:
        form = self.affine_form()
        if form is None:
            return None
        M = form[0]
        return 0.5 * (M + M.T)

    def min_symmetric_eigenvalue(self) -> Optional[float]:
        S = self.symmetric_part()
        if S is None:
            return None
        return float(np.linalg.eigvalsh(S)[0])

    def lipschitz_constant(self) -> Optional[float]:
        form = self.affine_form()
        if form is None:
            return None
        return float(np.linalg.norm(form[0], 2))

    def shape_errors(self) -> Dict[str, str]:
        """Field name -> problem for parameters whose shapes disagree."""
        errors = {}
        n = self.dimension
        if self.kind == MapKind.AFFINE:
            if self.M.shape != (n, n):
                errors["M"] = f"expected shape ({n}, {n}), got {self.M.shape}"
            if self.q.shape != (n,):
                errors["q"] = f"expected length {n}, got {self.q.shape[0]}"
        elif self.kind == MapKind.GRADIENT_OF_QUADRATIC:
            if self.b.shape != (self.A.shape[0],):
                errors["b"] = (
                    f"expected length {self.A.shape[0]}, got {self.b.shape[0]}"
                )
        return errors

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == MapKind.AFFINE:
            params = {"M": self.M.tolist(), "q": self.q.tolist()}
        elif self.kind == MapKind.GRADIENT_OF_QUADRATIC:
            params = {"A": self.A.tolist(), "b": self.b.tolist()}
        else:
            params = {"evaluator": getattr(self.evaluator, "__name__", "callable")}
        return {"variant": self.kind.value, "params": params}
