"""
Optimality certificates for candidate SMPEC solutions.
"""

from .kkt import KktCertificate, kkt_certificate
from .membership import MembershipReport, membership_check
from .multiplier import MultiplierCertificate, multiplier_certificate
from .report import (
    CertificationCoordinator,
    CertificationJob,
    CertificationReport,
    CheckResult,
    dump_reports,
)
from .sequential import SequentialResiduals, sequential_residuals
from .weak_bcq import BcqVerdict, WeakBcqDiagnostic, weak_bcq_check

__all__ = [
    "KktCertificate",
    "kkt_certificate",
    "MembershipReport",
    "membership_check",
    "MultiplierCertificate",
    "multiplier_certificate",
    "CertificationCoordinator",
    "CertificationJob",
    "CertificationReport",
    "CheckResult",
    "dump_reports",
    "SequentialResiduals",
    "sequential_residuals",
    "BcqVerdict",
    "WeakBcqDiagnostic",
    "weak_bcq_check",
]
