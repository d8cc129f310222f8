"""
Regularization loop for SMPEC.

With eps_k = eps0 / (k+1)^alpha decreasing to 0, iteration k solves

    min_{x in C}  f(x) + lambda_k * g_D(x),   lambda_k = 1 / eps_k

(equivalently min eps_k f + g_D), warm-started at x_{k-1}, and stops once
g_D(x_k) < mu. Each record keeps u_k in df(x_k), v_k in dg_D(x_k) and the
normal-cone element w_k = -u_k - lambda_k v_k.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..config import GapConfig, SolveConfig
from ..model.instance import ProblemInstance, ensure_validated
from ..model.objectives import ObjectiveKind
from ..model.types import Vector, as_vector
from .subgradient import solve_pk

logger = logging.getLogger(__name__)

STALL_EPS = 1e-12
CSV_COLUMNS = ["k", "epsilon", "gap", "objective", "inner_iters", "status"]


class TraceStatus(str, Enum):
    RUNNING = "running"
    THRESHOLD_MET = "threshold-met"
    ITERATION_CAP = "iteration-cap"
    STALLED = "stalled"


@dataclass
class IterationRecord:
    k: int
    x: Vector
    epsilon: float
    penalty: float
    gap: float
    objective: float
    inner_iterations: int
    u: Vector
    v: Vector
    w: Vector
    maximizers: List[Vector] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "x": self.x.tolist(),
            "epsilon": self.epsilon,
            "penalty": self.penalty,
            "gap": self.gap,
            "objective": self.objective,
            "inner_iterations": self.inner_iterations,
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "w": self.w.tolist(),
        }


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass
class SolveTrace:
    records: List[IterationRecord] = field(default_factory=list)
    status: TraceStatus = TraceStatus.RUNNING
    config: Optional[SolveConfig] = None

    def append(self, record: IterationRecord) -> None:
        self.records.append(record)

    @property
    def final(self) -> IterationRecord:
        if not self.records:
            raise ValueError("trace is empty")
        return self.records[-1]

    @property
    def final_x(self) -> Vector:
        return self.final.x

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        """Deterministic CSV with 17 significant digits; written to path when given"""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        last = len(self.records) - 1
        for i, r in enumerate(self.records):
            status = self.status.value if i == last else TraceStatus.RUNNING.value
            writer.writerow(
                [r.k, _fmt(r.epsilon), _fmt(r.gap), _fmt(r.objective), r.inner_iterations, status]
            )
        text = buf.getvalue()
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        return text

    def summary(self, inst: ProblemInstance) -> Dict[str, Any]:
        """Terminal x, f, g_D and status, plus distance and wrap-contact reports"""
        r = self.final
        data = {
            "status": self.status.value,
            "iterations": len(self.records),
            "x": r.x.tolist(),
            "objective": r.objective,
            "gap": r.gap,
            "epsilon": r.epsilon,
            "touches_wrap_box": inst.set.touches_wrap(r.x),
        }
        if inst.objective.kind == ObjectiveKind.QUADRATIC_DISTANCE:
            data["distance"] = float(np.sqrt(2.0 * max(r.objective, 0.0)))
        if inst.known_solution is not None:
            data["error_to_known_solution"] = float(np.linalg.norm(r.x - inst.known_solution))
        return data


def solve_smpec(
    inst: ProblemInstance,
    cfg: Optional[SolveConfig] = None,
    gap_config: Optional[GapConfig] = None,
) -> SolveTrace:
    cfg = cfg or SolveConfig()
    cfg.validate()
    inst = ensure_validated(inst)
    cset = inst.set

    x = cset.project(as_vector(cfg.x0, inst.dimension)) if cfg.x0 is not None else cset.center()
    trace = SolveTrace(config=cfg)
    logger.info(
        f"Solving {inst.name}: eps0={cfg.epsilon0:g}, alpha={cfg.alpha:g}, mu={cfg.mu:g}"
    )

    prev_x = None
    for k in range(cfg.max_outer):
        eps_k = cfg.epsilon(k)
        lam = 1.0 / eps_k
        res = solve_pk(inst, lam, x, cfg.subproblem, gap_config)
        x_k = res.x
        ev = res.gap
        u = inst.objective.subgradient(x_k)
        v = ev.subgradient
        record = IterationRecord(
            k=k,
            x=x_k,
            epsilon=eps_k,
            penalty=lam,
            gap=ev.value,
            objective=inst.objective.value(x_k),
            inner_iterations=res.iterations,
            u=u,
            v=v,
            w=-u - lam * v,
            maximizers=ev.maximizers,
        )
        trace.append(record)
        logger.info(
            f"k={k} eps={eps_k:.3e} g_D={record.gap:.3e} f={record.objective:.10g} "
            f"inner={res.iterations}"
        )

        if ev.value < cfg.mu:
            trace.status = TraceStatus.THRESHOLD_MET
            break
        if prev_x is not None and np.array_equal(prev_x, x_k) and eps_k < STALL_EPS:
            trace.status = TraceStatus.STALLED
            logger.warning(f"Regularization stalled at k={k} with g_D={ev.value:.3e}")
            break
        prev_x = x_k
        x = x_k
    else:
        trace.status = TraceStatus.ITERATION_CAP

    logger.info(f"Finished with status {trace.status.value} after {len(trace)} iterations")
    return trace
