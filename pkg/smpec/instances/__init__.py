"""
Instance files and built-in demo instances.
"""

from .demos import (
    DEMOS,
    DemoName,
    DemoSpec,
    basis_pursuit_instance,
    distance_instance,
    example_3_1,
    example_3_2,
    get_demo,
    list_demos,
    materialize_demo,
    primal_dual_lp_instance,
)
from .schema import parse_instance, parse_instance_text, serialize_instance

__all__ = [
    "DEMOS",
    "DemoName",
    "DemoSpec",
    "basis_pursuit_instance",
    "distance_instance",
    "example_3_1",
    "example_3_2",
    "get_demo",
    "list_demos",
    "materialize_demo",
    "primal_dual_lp_instance",
    "parse_instance",
    "parse_instance_text",
    "serialize_instance",
]
