"""
Weak basic constraint qualification diagnostic:

    dg_D(x̄) ∩ (-bd N_C(x̄)) = ∅

dg_D(x̄) is represented by the hull of F(y) over the argmax sample, the relative
boundary of N_C(x̄) by its facets, each a cone over a subset of the generators.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import nnls

from ..config import GapConfig
from ..errors import UnsupportedSetDimension
from ..gap.dual_gap import argmax_set, eval_gap
from ..model.instance import ProblemInstance, ensure_validated
from ..model.sets import SetKind
from ..model.types import ArrayLike, Matrix, Vector

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
FACE_TOL = 1e-9
MAX_POLYTOPE_DIM = 3


class BcqVerdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass
class WeakBcqDiagnostic:
    point: Vector
    generators: List[Vector]
    cone_dimension: int
    boundary_faces: List[Matrix]
    distance: float
    verdict: BcqVerdict
    tol: float
    witness: Optional[Vector] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "point": self.point.tolist(),
            "subdifferential_generators": [g.tolist() for g in self.generators],
            "normal_cone_dimension": self.cone_dimension,
            "boundary_faces": [face.T.tolist() for face in self.boundary_faces],
            "distance": self.distance,
            "witness": None if self.witness is None else self.witness.tolist(),
            "tol": self.tol,
            "notes": list(self.notes),
        }


def relative_boundary_faces(G: Matrix, tol: float = FACE_TOL) -> Tuple[int, List[Matrix]]:
    """
    Dimension of cone(G) and the generator sets of its facets.

    A facet is cut out by a normal h in span(G) orthogonal to d-1 independent
    generators with <h, g> <= 0 for all generators; it is the cone over every
    generator orthogonal to h. For the origin cone the boundary is {0}; a ray
    has boundary {0}; a line has none.
    """
    n, p = G.shape
    empty = np.zeros((n, 0))
    if p == 0 or np.linalg.matrix_rank(G, tol=RANK_TOL) == 0:
        return 0, [empty]

    U, s, _ = np.linalg.svd(G, full_matrices=False)
    d = int(np.sum(s > RANK_TOL * max(1.0, s[0])))
    Gc = U[:, :d].T @ G

    faces: List[Matrix] = []
    seen = set()
    for subset in combinations(range(p), d - 1):
        if d == 1:
            normals = [np.ones(1)]
        else:
            S = Gc[:, list(subset)]
            if np.linalg.matrix_rank(S, tol=RANK_TOL) != d - 1:
                continue
            normals = [np.linalg.svd(S.T)[2][-1]]
        for h in normals:
            for sign in (1.0, -1.0):
                vals = sign * h @ Gc
                if np.all(vals <= tol):
                    on = tuple(int(i) for i in np.flatnonzero(np.abs(vals) <= tol))
                    if on not in seen:
                        seen.add(on)
                        faces.append(G[:, list(on)] if on else empty)
    return d, faces


def hull_to_cone_distance(H: Matrix, Gf: Matrix) -> Tuple[float, Vector]:
    """
    min ||H alpha + Gf beta|| over alpha in the simplex, beta >= 0.

    Nonnegative least squares with a heavily weighted row of ones enforcing
    sum(alpha) = 1; alpha is renormalized and the distance recomputed exactly.
    Returns the distance and the hull point H alpha.
    """
    m, r = H.shape[1], Gf.shape[1]
    scale = 1e4 * (1.0 + float(np.abs(H).max(initial=0.0)) + float(np.abs(Gf).max(initial=0.0)))
    A = np.vstack([np.hstack([H, Gf]), np.concatenate([np.full(m, scale), np.zeros(r)])])
    b = np.append(np.zeros(H.shape[0]), scale)
    sol, _ = nnls(A, b)
    alpha = sol[:m]
    total = alpha.sum()
    alpha = alpha / total if total > 0 else np.full(m, 1.0 / m)
    beta = sol[m:]
    point = H @ alpha
    return float(np.linalg.norm(point + Gf @ beta)), point


def weak_bcq_check(
    inst: ProblemInstance,
    x_bar: ArrayLike,
    tol: float = 1e-6,
    config: Optional[GapConfig] = None,
) -> WeakBcqDiagnostic:
    inst = ensure_validated(inst)
    x_bar = inst.set.require_member(x_bar)
    if inst.set.kind == SetKind.POLYTOPE and inst.dimension > MAX_POLYTOPE_DIM:
        raise UnsupportedSetDimension(
            f"facet enumeration for polytopes is limited to n <= {MAX_POLYTOPE_DIM}",
            dimension=inst.dimension,
        )

    ev = eval_gap(inst, x_bar, config)
    sample = argmax_set(inst, x_bar, config=config)
    generators = [inst.map(y) for y in sample]
    H = np.array(generators).T.reshape(inst.dimension, -1)

    G = inst.set.normal_cone_generators(x_bar)
    dim, faces = relative_boundary_faces(G)

    distance = np.inf
    witness = None
    for face in faces:
        dist, point = hull_to_cone_distance(H, face)
        if dist < distance:
            distance, witness = dist, point

    notes = []
    if ev.value > tol:
        notes.append(f"g_D(x̄) = {ev.value:.3e} > tol: x̄ does not solve the lower level")
    if not faces:
        notes.append("N_C(x̄) is a subspace: its relative boundary is empty")

    if not ev.certified:
        verdict = BcqVerdict.INCONCLUSIVE
        notes.append("argmax sample comes from an uncertified inner solve")
    elif distance > tol:
        verdict = BcqVerdict.HOLDS
    else:
        verdict = BcqVerdict.FAILS

    diag = WeakBcqDiagnostic(
        point=x_bar,
        generators=generators,
        cone_dimension=dim,
        boundary_faces=faces,
        distance=float(distance),
        verdict=verdict,
        tol=tol,
        witness=witness if verdict == BcqVerdict.FAILS else None,
        notes=notes,
    )
    log = logger.info if verdict == BcqVerdict.HOLDS else logger.warning
    log(f"Weak BCQ {verdict.value} at {x_bar.tolist()} (distance {distance:.3e})")
    return diag
