"""
Instance files: strict YAML schema, parsing with line diagnostics, serialization.

    name: distance-estimation        # optional
    dimension: 2
    objective: {variant: quadratic-distance, params: {anchor: [2, 2]}}
    map:       {variant: gradient-of-quadratic, params: {A: [[1, 0]], b: [0]}}
    set:       {variant: box, params: {lower: [-1, -1], upper: [1, 1]}}
    known_solution: [0, 1]          # optional

Matrices are row-major nested lists. Infinite box bounds (``.inf``) and
unbounded polytopes are wrapped in [-R, R]^n at parse time.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from ..config import InstanceConfig
from ..errors import ParseError, SchemaViolation
from ..model.instance import ProblemInstance, validate_instance
from ..model.maps import MapKind, MonotoneMap
from ..model.objectives import ConvexObjective, ObjectiveKind
from ..model.sets import SetKind, build_set, wrap_unbounded
from ..model.types import plain

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {"name", "dimension", "objective", "map", "set", "known_solution"}
REQUIRED_KEYS = ("dimension", "objective", "map", "set")
PART_KEYS = {"variant", "params"}

OBJECTIVE_PARAMS = {
    ObjectiveKind.QUADRATIC_DISTANCE: {"anchor"},
    ObjectiveKind.SQUARED_NORM: set(),
    ObjectiveKind.L1_NORM: set(),
    ObjectiveKind.LINEAR: {"c"},
    ObjectiveKind.WEIGHTED_SUM: {"terms"},
}
MAP_PARAMS = {
    MapKind.AFFINE: {"M", "q"},
    MapKind.GRADIENT_OF_QUADRATIC: {"A", "b"},
}
SET_PARAMS = {
    SetKind.BOX: {"lower", "upper"},
    SetKind.BALL: {"center", "radius"},
    SetKind.POLYTOPE: {"A", "b"},
    SetKind.SIMPLEX: {"scale"},
}


class _Reader:
    """Walks the loaded document alongside its node tree for error locations"""

    def __init__(self, root: yaml.Node, path: Optional[str]):
        self.root = root
        self.path = path

    def line_of(self, dotted: str) -> Optional[int]:
        node = self.root
        for part in dotted.split("."):
            if isinstance(node, yaml.MappingNode):
                match = next((v for k, v in node.value if k.value == part), None)
            elif (
                isinstance(node, yaml.SequenceNode)
                and part.isdigit()
                and int(part) < len(node.value)
            ):
                match = node.value[int(part)]
            else:
                match = None
            if match is None:
                break
            node = match
        return node.start_mark.line + 1

    def fail(self, field: str, message: str) -> SchemaViolation:
        return SchemaViolation(message, field=field, path=self.path, line=self.line_of(field))

    def mapping(self, data: Any, field: str) -> Dict[str, Any]:
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise self.fail(field, f"expected a mapping, got {type(data).__name__}")
        return data

    def strict(self, data: Dict[str, Any], allowed: set, field: str) -> None:
        unknown = sorted(set(data) - allowed)
        if unknown:
            where = f"{field}.{unknown[0]}" if field else unknown[0]
            raise self.fail(where, f"unknown field(s) {unknown}; allowed: {sorted(allowed)}")

    def require(self, data: Dict[str, Any], keys: Sequence[str], field: str) -> None:
        for key in keys:
            if key not in data:
                raise self.fail(field or key, f"missing required field '{key}'")

    def vector(self, value: Any, field: str, length: Optional[int] = None) -> np.ndarray:
        try:
            v = np.asarray(value, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise self.fail(field, f"not a numeric vector ({e})") from e
        if v.ndim != 1:
            raise self.fail(field, f"expected a vector, got shape {v.shape}")
        if length is not None and v.shape[0] != length:
            raise self.fail(field, f"expected length {length}, got {v.shape[0]}")
        return v

    def matrix(
        self, value: Any, field: str, rows: Optional[int] = None, cols: Optional[int] = None
    ) -> np.ndarray:
        try:
            m = np.asarray(value, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise self.fail(field, f"not a numeric matrix ({e})") from e
        if m.ndim != 2:
            raise self.fail(field, f"expected a matrix (nested rows), got shape {m.shape}")
        if (rows is not None and m.shape[0] != rows) or (cols is not None and m.shape[1] != cols):
            expected = (rows if rows is not None else "m", cols if cols is not None else "n")
            raise self.fail(field, f"expected shape {expected}, got {m.shape}")
        return m

    def scalar(self, value: Any, field: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(field, f"expected a number, got {value!r}")
        return float(value)

    def variant(self, part: Dict[str, Any], enum, table: Dict, field: str):
        self.strict(part, PART_KEYS, field)
        self.require(part, ("variant",), field)
        try:
            kind = enum(part["variant"])
        except ValueError:
            raise self.fail(
                f"{field}.variant",
                f"unknown variant {part['variant']!r}; expected one of {[k.value for k in table]}",
            ) from None
        if kind not in table:
            raise self.fail(
                f"{field}.variant", f"variant {kind.value!r} cannot be read from a file"
            )
        params = self.mapping(part.get("params"), f"{field}.params")
        self.strict(params, table[kind], f"{field}.params")
        self.require(params, sorted(table[kind]), f"{field}.params")
        return kind, params


def _objective(r: _Reader, part: Dict[str, Any], n: int, field: str) -> ConvexObjective:
    kind, params = r.variant(part, ObjectiveKind, OBJECTIVE_PARAMS, field)
    if kind == ObjectiveKind.QUADRATIC_DISTANCE:
        anchor = r.vector(params["anchor"], f"{field}.params.anchor", n)
        return ConvexObjective.quadratic_distance(anchor)
    if kind == ObjectiveKind.SQUARED_NORM:
        return ConvexObjective.squared_norm(n)
    if kind == ObjectiveKind.L1_NORM:
        return ConvexObjective.l1_norm(n)
    if kind == ObjectiveKind.LINEAR:
        return ConvexObjective.linear(r.vector(params["c"], f"{field}.params.c", n))

    terms_field = f"{field}.params.terms"
    raw_terms = params["terms"]
    if not isinstance(raw_terms, list) or not raw_terms:
        raise r.fail(terms_field, "expected a non-empty list of terms")
    terms = []
    for i, raw in enumerate(raw_terms):
        term_field = f"{terms_field}.{i}"
        raw = dict(r.mapping(raw, term_field))
        if "weight" not in raw:
            raise r.fail(term_field, "missing required field 'weight'")
        weight = r.scalar(raw.pop("weight"), f"{term_field}.weight")
        if weight < 0:
            raise r.fail(f"{term_field}.weight", "weights must be nonnegative")
        terms.append((weight, _objective(r, raw, n, term_field)))
    return ConvexObjective.weighted_sum(terms)


def _map(r: _Reader, part: Dict[str, Any], n: int) -> MonotoneMap:
    kind, params = r.variant(part, MapKind, MAP_PARAMS, "map")
    if kind == MapKind.AFFINE:
        M = r.matrix(params["M"], "map.params.M", n, n)
        q = r.vector(params["q"], "map.params.q", n)
        return MonotoneMap.affine(M, q)
    A = r.matrix(params["A"], "map.params.A", cols=n)
    b = r.vector(params["b"], "map.params.b", A.shape[0])
    return MonotoneMap.gradient_of_quadratic(A, b)


def _set(r: _Reader, part: Dict[str, Any], n: int):
    kind, params = r.variant(part, SetKind, SET_PARAMS, "set")
    checked: Dict[str, Any] = {}
    if kind == SetKind.BOX:
        checked["lower"] = r.vector(params["lower"], "set.params.lower", n)
        checked["upper"] = r.vector(params["upper"], "set.params.upper", n)
    elif kind == SetKind.BALL:
        checked["center"] = r.vector(params["center"], "set.params.center", n)
        checked["radius"] = r.scalar(params["radius"], "set.params.radius")
        if not checked["radius"] > 0:
            raise r.fail("set.params.radius", "radius must be positive")
    elif kind == SetKind.SIMPLEX:
        checked["scale"] = r.scalar(params["scale"], "set.params.scale")
        if not checked["scale"] > 0:
            raise r.fail("set.params.scale", "scale must be positive")
    else:
        checked["A"] = r.matrix(params["A"], "set.params.A", cols=n)
        checked["b"] = r.vector(params["b"], "set.params.b", checked["A"].shape[0])
    return build_set(kind.value, checked, n)


def _compose(text: str, path: Optional[str]) -> Tuple[yaml.Node, Any]:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseError(
            f"malformed instance file: {getattr(e, 'problem', None) or e}",
            path=path,
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from e
    if root is None or not isinstance(data, dict):
        raise ParseError("instance file must contain a mapping at the top level", path=path, line=1)
    return root, data


def parse_instance_text(
    text: str,
    path: Optional[str] = None,
    box_radius: float = InstanceConfig.box_radius,
    name: Optional[str] = None,
) -> ProblemInstance:
    """Parse, wrap and validate an instance document"""
    root, data = _compose(text, path)
    r = _Reader(root, path)
    r.strict(data, TOP_LEVEL_KEYS, "")
    r.require(data, REQUIRED_KEYS, "")

    n = data["dimension"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise r.fail("dimension", f"expected a positive integer, got {n!r}")

    objective = _objective(r, r.mapping(data["objective"], "objective"), n, "objective")
    vi_map = _map(r, r.mapping(data["map"], "map"), n)
    cset = wrap_unbounded(_set(r, r.mapping(data["set"], "set"), n), box_radius)

    known = data.get("known_solution")
    known = None if known is None else r.vector(known, "known_solution", n)

    inst = ProblemInstance(
        objective=objective,
        map=vi_map,
        set=cset,
        dimension=n,
        known_solution=known,
        name=str(data.get("name") or name or "instance"),
    )
    report = validate_instance(inst)
    logger.debug(f"Parsed instance {inst.name} (n={n}) from {path or '<text>'}")
    return report.instance


def parse_instance(
    path: Union[str, Path], box_radius: float = InstanceConfig.box_radius
) -> ProblemInstance:
    """Load an instance file; the file stem names the instance unless it sets 'name'"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read instance file: {e}", path=str(path)) from e
    return parse_instance_text(text, path=str(path), box_radius=box_radius, name=path.stem)


def instance_document(inst: ProblemInstance) -> Dict[str, Any]:
    if inst.map.kind == MapKind.BLACK_BOX:
        raise SchemaViolation("black-box maps cannot be written to an instance file", field="map")
    return plain({"name": inst.name, **inst.to_dict()})


def serialize_instance(inst: ProblemInstance, path: Optional[Union[str, Path]] = None) -> str:
    """YAML text of the instance in schema order; written to path when given"""
    text = yaml.safe_dump(instance_document(inst), sort_keys=False, default_flow_style=None)
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    return text

