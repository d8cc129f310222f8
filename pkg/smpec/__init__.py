"""
smpec - minimize a convex function over the solutions of a monotone variational
inequality, through the dual gap function g_D(x) = sup_{y in C} <F(y), x - y>.
"""

from .__version__ import __version__, get_version_info
from .config import SmpecConfig, load_config
from .errors import SmpecError
from .gap import eval_gap
from .model import ProblemInstance, validate_instance
from .solver import solve_smpec, solve_vi

__all__ = [
    "__version__",
    "get_version_info",
    "SmpecConfig",
    "load_config",
    "SmpecError",
    "eval_gap",
    "ProblemInstance",
    "validate_instance",
    "solve_smpec",
    "solve_vi",
]
