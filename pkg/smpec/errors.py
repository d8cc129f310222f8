"""
Exception hierarchy for the SMPEC toolkit.

Library code raises these; only the CLI turns them into messages and exit codes.
"""

from typing import Any, Optional


class SmpecError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }


# Instance files


class ParseError(SmpecError):
    """Malformed instance or config file"""

    exit_code = 2

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column else ")")
        super().__init__(f"{message}{location}", path=path, line=line, column=column)
        self.path = path
        self.line = line
        self.column = column


class SchemaViolation(ParseError):
    """Well-formed file whose content does not match the instance schema"""

    def __init__(
        self,
        message: str,
        field: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
    ):
        super().__init__(f"{field}: {message}", path=path, line=line)
        self.field = field


# Standing assumptions


class ValidationError(SmpecError):
    exit_code = 3


class DimensionMismatch(ValidationError):
    def __init__(self, message: str, expected: int, actual: int, field: str = ""):
        super().__init__(message, expected=expected, actual=actual, field=field)
        self.expected = expected
        self.actual = actual
        self.field = field


class MonotonicityViolation(ValidationError):
    """F fails monotonicity; carries the offending eigenvalue or inner product"""

    def __init__(self, message: str, eigenvalue: Optional[float] = None, pair=None):
        super().__init__(message, eigenvalue=eigenvalue)
        self.eigenvalue = eigenvalue
        self.pair = pair


class UnboundedSet(ValidationError):
    pass


class PointNotInSet(ValidationError):
    def __init__(self, message: str, violation: float):
        super().__init__(message, violation=violation)
        self.violation = violation


# Numerical failures


class SolverError(SmpecError):
    exit_code = 4


class ProjectionNonConvergence(SolverError):
    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message, iterations=iterations, residual=residual)
        self.iterations = iterations
        self.residual = residual


class InnerNonConvergence(SolverError):
    def __init__(self, message: str, iterations: int, fw_gap: float):
        super().__init__(message, iterations=iterations, fw_gap=fw_gap)
        self.iterations = iterations
        self.fw_gap = fw_gap


class IterationCapExceeded(SolverError):
    """Iteration cap hit; the partial result is attached"""

    def __init__(self, message: str, iterations: int, partial: Any = None):
        super().__init__(message, iterations=iterations)
        self.iterations = iterations
        self.partial = partial


class HullReductionError(SolverError):
    pass


class TargetNotInHull(HullReductionError):
    def __init__(self, message: str, residual: float):
        super().__init__(message, residual=residual)
        self.residual = residual


# Certificates


class CertificationError(SmpecError):
    exit_code = 5


class LowerLevelInfeasible(CertificationError):
    """x̄ does not solve the lower-level VI to the requested tolerance"""

    def __init__(self, message: str, gap: float, tol: float):
        super().__init__(message, gap=gap, tol=tol)
        self.gap = gap
        self.tol = tol


class UncertifiedInput(CertificationError):
    pass


class UnsupportedSetDimension(CertificationError):
    def __init__(self, message: str, dimension: int):
        super().__init__(message, dimension=dimension)
        self.dimension = dimension


class CertificateNotMet(CertificationError):
    """Raised by the CLI when a certificate was computed but did not certify"""

    pass
