"""
Certification Coordinator - runs every certificate on a candidate point

Combines the KKT certificate, the weak BCQ diagnostic, the multiplier
certificate and (when a solve trace is available) the sequential residuals
into one report. Batches of independent instances are certified concurrently.
"""

import asyncio
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml

from ..config import SmpecConfig
from ..errors import CertificationError
from ..model.instance import ProblemInstance, ensure_validated
from ..model.types import ArrayLike, Vector, as_vector, plain
from ..solver.regularization import SolveTrace, TraceStatus
from .kkt import KktCertificate, kkt_certificate
from .multiplier import MultiplierCertificate, multiplier_certificate
from .sequential import SequentialResiduals, sequential_residuals
from .weak_bcq import WeakBcqDiagnostic, weak_bcq_check

logger = logging.getLogger(__name__)

SEQUENTIAL_TOL = 1e-3


class CheckResult:
    """Outcome of one certificate check"""

    def __init__(self, check_name: str, passed: bool, **kwargs):
        self.name = check_name
        self.passed = passed
        self.metadata = kwargs

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            **self.metadata,
        }


@dataclass
class CertificationJob:
    """One instance/point pair for batch certification"""

    instance: ProblemInstance
    point: ArrayLike
    trace: Optional[SolveTrace] = None
    tol: Optional[float] = None


@dataclass
class CertificationReport:
    instance: str
    point: Vector
    tol: float
    checks: List[CheckResult] = field(default_factory=list)
    kkt: Optional[KktCertificate] = None
    weak_bcq: Optional[WeakBcqDiagnostic] = None
    multiplier: Optional[MultiplierCertificate] = None
    sequential: Optional[SequentialResiduals] = None

    @property
    def certified(self) -> bool:
        """Overall verdict: the KKT and multiplier certificates both pass"""
        return bool(
            self.kkt is not None
            and self.kkt.certified
            and self.multiplier is not None
            and self.multiplier.certified
        )

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "instance": self.instance,
            "point": self.point.tolist(),
            "verdict": "certified" if self.certified else "not-certified",
            "tol": self.tol,
            "checks": [c.to_dict() for c in self.checks],
            "kkt": self.kkt.to_dict() if self.kkt else None,
            "weak_bcq": self.weak_bcq.to_dict() if self.weak_bcq else None,
            "multiplier": self.multiplier.to_dict() if self.multiplier else None,
            "sequential": self.sequential.to_dict() if self.sequential else None,
        }

    def to_yaml(self, path: Optional[Union[str, Path]] = None) -> str:
        text = yaml.safe_dump(plain(self.to_dict()), sort_keys=False, default_flow_style=None)
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                f.write(text)
        return text


def dump_reports(reports: Sequence[CertificationReport], path: Union[str, Path]) -> str:
    """Write one YAML document per report"""
    text = yaml.safe_dump_all(
        [plain(r.to_dict()) for r in reports], sort_keys=False, default_flow_style=None
    )
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return text


class CertificationCoordinator:
    """
    Runs all certificate checks at a candidate point
    """

    def __init__(self, config: Optional[SmpecConfig] = None):
        self.config = config or SmpecConfig()
        self.gap_config = self.config.gap
        self.tol = self.config.certify.tol

    def certify(
        self,
        inst: ProblemInstance,
        x_bar: ArrayLike,
        trace: Optional[SolveTrace] = None,
        tol: Optional[float] = None,
    ) -> CertificationReport:
        inst = ensure_validated(inst)
        tol = self.tol if tol is None else tol
        x_bar = as_vector(x_bar, inst.dimension)
        report = CertificationReport(instance=inst.name, point=x_bar, tol=tol)
        logger.info(f"🔒 Certifying {inst.name} at {x_bar.tolist()} (tol {tol:g})")

        try:
            report.kkt = kkt_certificate(inst, x_bar, tol, self.gap_config)
            report.checks.append(
                CheckResult(
                    "kkt",
                    report.kkt.certified,
                    stationarity=report.kkt.stationarity_residual,
                    complementarity=report.kkt.complementarity_residual,
                )
            )
        except CertificationError as e:
            logger.warning(f"KKT certificate not attempted: {e}")
            report.checks.append(CheckResult("kkt", False, error=str(e), **e.context))

        try:
            report.weak_bcq = weak_bcq_check(inst, x_bar, tol, self.gap_config)
            report.checks.append(
                CheckResult(
                    "weak_bcq",
                    report.weak_bcq.verdict.value == "holds",
                    verdict=report.weak_bcq.verdict.value,
                    distance=report.weak_bcq.distance,
                )
            )
        except CertificationError as e:
            logger.warning(f"Weak BCQ diagnostic skipped: {e}")
            report.checks.append(CheckResult("weak_bcq", False, error=str(e), **e.context))

        try:
            report.multiplier = multiplier_certificate(inst, x_bar, tol, self.gap_config)
            report.checks.append(
                CheckResult(
                    "multiplier",
                    report.multiplier.certified,
                    residual=report.multiplier.residual,
                    scalar_multiplier=report.multiplier.scalar_multiplier,
                )
            )
        except CertificationError as e:
            logger.warning(f"Multiplier certificate not attempted: {e}")
            report.checks.append(CheckResult("multiplier", False, error=str(e), **e.context))

        if trace is not None and len(trace):
            report.sequential = sequential_residuals(inst, trace, x_bar)
            converged = trace.status == TraceStatus.THRESHOLD_MET
            report.checks.append(
                CheckResult(
                    "sequential",
                    converged and report.sequential.within(SEQUENTIAL_TOL),
                    trace_status=trace.status.value,
                    tail_maxima=report.sequential.tail_maxima,
                )
            )

        if report.certified:
            logger.info(f"✅ {inst.name}: certified")
        else:
            failed = [c.name for c in report.checks if not c.passed]
            logger.warning(f"❌ {inst.name}: not certified (failed checks: {failed})")
        return report

    async def certify_batch(self, jobs: Sequence[CertificationJob]) -> List[CertificationReport]:
        """Certify independent jobs concurrently in worker threads, preserving order"""
        if not jobs:
            return []
        logger.info(f"Certifying {len(jobs)} instance(s)")
        tasks = [
            asyncio.to_thread(self.certify, job.instance, job.point, job.trace, job.tol)
            for job in jobs
        ]
        return list(await asyncio.gather(*tasks))
