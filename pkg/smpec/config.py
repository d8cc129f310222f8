"""
Configuration dataclasses and YAML loading.

Precedence: CLI flags > YAML file (``smpec:`` section) > dataclass defaults.
"""

import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = ".smpec/config.yaml"
STEP_RULES = ("halving", "diminishing")


def _known(cls, data: Optional[Dict[str, Any]], section: str) -> Dict[str, Any]:
    data = dict(data or {})
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ParseError(f"unknown keys in config section '{section}': {', '.join(unknown)}")
    return data


@dataclass
class SubproblemConfig:
    """Projected-subgradient settings for one (P_k) subproblem"""

    step_rule: str = "halving"
    step0: Optional[float] = None  # None means 0.1 * diam(C)
    max_inner: int = 5000
    inner_tol: float = 1e-10
    window: int = 100

    def validate(self) -> None:
        if self.step_rule not in STEP_RULES:
            raise ValidationError(f"step_rule must be one of {STEP_RULES}, got {self.step_rule!r}")
        if self.step0 is not None and self.step0 <= 0:
            raise ValidationError("step0 must be positive")
        if self.max_inner < 1 or self.window < 1:
            raise ValidationError("max_inner and window must be at least 1")
        if self.inner_tol <= 0:
            raise ValidationError("inner_tol must be positive")

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "SubproblemConfig":
        return cls(**_known(cls, data, "smpec.solver.subproblem"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SolveConfig:
    """Outer regularization loop"""

    epsilon0: float = 1.0
    alpha: float = 1.0
    mu: float = 1e-6
    max_outer: int = 200
    x0: Optional[List[float]] = None
    subproblem: SubproblemConfig = field(default_factory=SubproblemConfig)

    def epsilon(self, k: int) -> float:
        return self.epsilon0 / (k + 1) ** self.alpha

    def validate(self) -> None:
        if not self.epsilon0 > 0:
            raise ValidationError("epsilon0 must be positive")
        if not 0 < self.alpha <= 1:
            raise ValidationError("alpha must lie in (0, 1]")
        if self.mu < 0:
            raise ValidationError("mu must be nonnegative")
        if self.max_outer < 1:
            raise ValidationError("max_outer must be at least 1")
        if self.mu == 0:
            logger.warning("mu = 0: the threshold test can never pass, the run ends at the cap")
        self.subproblem.validate()

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "SolveConfig":
        data = _known(cls, data, "smpec.solver")
        data["subproblem"] = SubproblemConfig.from_dict(data.get("subproblem"))
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class GapConfig:
    """Inner maximization behind g_D"""

    argmax_tol: float = 1e-6
    fw_tol: float = 1e-8
    fw_max_iter: int = 100000
    multistart: int = 32
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "GapConfig":
        return cls(**_known(cls, data, "smpec.gap"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ViConfig:
    tol: float = 1e-8
    max_iter: int = 100000

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "ViConfig":
        return cls(**_known(cls, data, "smpec.vi"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CertifyConfig:
    tol: float = 1e-6

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "CertifyConfig":
        return cls(**_known(cls, data, "smpec.certify"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class InstanceConfig:
    box_radius: float = 1e3

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "InstanceConfig":
        return cls(**_known(cls, data, "smpec.instance"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LoggingConfig:
    level: str = "INFO"
    file: str = ".smpec/smpec.log"

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "LoggingConfig":
        return cls(**_known(cls, data, "smpec.logging"))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SmpecConfig:
    """Whole configuration file"""

    solver: SolveConfig = field(default_factory=SolveConfig)
    gap: GapConfig = field(default_factory=GapConfig)
    vi: ViConfig = field(default_factory=ViConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    instance: InstanceConfig = field(default_factory=InstanceConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "SmpecConfig":
        section = (data or {}).get("smpec") or {}
        _known(cls, section, "smpec")
        return cls(
            solver=SolveConfig.from_dict(section.get("solver")),
            gap=GapConfig.from_dict(section.get("gap")),
            vi=ViConfig.from_dict(section.get("vi")),
            certify=CertifyConfig.from_dict(section.get("certify")),
            instance=InstanceConfig.from_dict(section.get("instance")),
            logging=LoggingConfig.from_dict(section.get("logging")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"smpec": asdict(self)}


def load_config(config_path: Optional[str] = None) -> SmpecConfig:
    """Load the YAML config; a missing file yields the built-in defaults"""
    path = Path(config_path or DEFAULT_CONFIG_PATH)
    if not path.exists():
        logger.debug(f"Config file not found: {path}, using defaults")
        return SmpecConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML config: {e}")
        mark = getattr(e, "problem_mark", None)
        raise ParseError(
            f"invalid YAML config: {getattr(e, 'problem', e)}",
            path=str(path),
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from e
    if data is not None and not isinstance(data, dict):
        raise ParseError(f"config {path} must be a mapping with an 'smpec' section", path=str(path))
    try:
        return SmpecConfig.from_dict(data)
    except TypeError as e:
        raise ParseError(f"invalid config {path}: {e}", path=str(path)) from e
