"""
Tests for instance files and the built-in demo catalog
"""

import numpy as np
import pytest
import yaml

from smpec.certify import weak_bcq_check
from smpec.errors import (
    MonotonicityViolation,
    ParseError,
    SchemaViolation,
)
from smpec.instances import (
    DEMOS,
    get_demo,
    list_demos,
    materialize_demo,
    parse_instance,
    parse_instance_text,
    serialize_instance,
)
from smpec.instances.schema import instance_document
from smpec.model import Box, ConvexObjective, MapKind, MonotoneMap, ProblemInstance

WRONG_SHAPE = """\
dimension: 2
objective:
  variant: squared-norm
map:
  variant: affine
  params:
    M: [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
    q: [0.0, 0.0]
set:
  variant: box
  params: {lower: [0, 0], upper: [1, 1]}
"""


def _dump(document) -> str:
    return yaml.safe_dump(document, sort_keys=False)


class TestParsing:
    """Parsing and validating instance files"""

    def test_parse_file(self, affine_box_file):
        inst = parse_instance(affine_box_file)
        assert inst.name == "affine-box"
        assert inst.dimension == 2
        assert inst.map.kind == MapKind.AFFINE
        assert inst.validated
        assert np.array_equal(inst.known_solution, [0.0, 0.0])

    def test_file_stem_names_unnamed_instance(self, temp_dir, affine_box_document):
        del affine_box_document["name"]
        path = temp_dir / "from-stem.yaml"
        path.write_text(_dump(affine_box_document))
        assert parse_instance(path).name == "from-stem"

    def test_round_trip(self, affine_box_file):
        inst = parse_instance(affine_box_file)
        again = parse_instance_text(serialize_instance(inst))
        assert again.name == inst.name
        assert again.to_dict() == inst.to_dict()

    def test_demo_round_trip(self, temp_dir):
        for preset in list_demos():
            path = materialize_demo(preset.name, temp_dir / f"{preset.name.value}.yaml")
            assert parse_instance(path).to_dict() == preset.instance().to_dict()

    def test_weighted_sum_objective(self, affine_box_document):
        affine_box_document["objective"] = {
            "variant": "weighted-sum",
            "params": {
                "terms": [
                    {"weight": 1.0, "variant": "l1-norm"},
                    {"weight": 0.5, "variant": "linear", "params": {"c": [1.0, -1.0]}},
                ]
            },
        }
        inst = parse_instance_text(_dump(affine_box_document))
        assert inst.objective.value([1.0, 2.0]) == pytest.approx(3.0 - 0.5)

    def test_infinite_bounds_are_wrapped(self, affine_box_document):
        affine_box_document["set"]["params"]["upper"] = [1.0, float("inf")]
        inst = parse_instance_text(_dump(affine_box_document), box_radius=50.0)
        assert np.array_equal(inst.set.upper, [1.0, 50.0])
        assert inst.set.touches_wrap([0.0, 50.0])

    def test_polytope_and_ball_sets(self, affine_box_document):
        affine_box_document["set"] = {
            "variant": "polytope",
            "params": {"A": [[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], "b": [1.0, 0.0, 0.0]},
        }
        assert parse_instance_text(_dump(affine_box_document)).set.is_bounded
        affine_box_document["set"] = {
            "variant": "ball",
            "params": {"center": [0.0, 0.0], "radius": 2.0},
        }
        assert parse_instance_text(_dump(affine_box_document)).set.radius == 2.0


class TestSchemaErrors:
    """Diagnostics name the offending field and line"""

    def test_wrong_matrix_shape(self):
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(WRONG_SHAPE)
        assert exc_info.value.field == "map.params.M"
        assert exc_info.value.line == 7
        assert exc_info.value.exit_code == 2

    def test_unknown_param(self, affine_box_document):
        affine_box_document["map"]["params"]["X"] = 1
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "map.params.X"

    def test_unknown_top_level_key(self, affine_box_document):
        affine_box_document["solver"] = {}
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "solver"

    def test_missing_section(self, affine_box_document):
        del affine_box_document["set"]
        with pytest.raises(SchemaViolation, match="set"):
            parse_instance_text(_dump(affine_box_document))

    def test_unknown_variant(self, affine_box_document):
        affine_box_document["set"]["variant"] = "cylinder"
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "set.variant"

    def test_black_box_not_readable(self, affine_box_document):
        affine_box_document["map"] = {"variant": "black-box", "params": {}}
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "map.variant"

    @pytest.mark.parametrize("dimension", [0, -1, 1.5, "two", True])
    def test_bad_dimension(self, affine_box_document, dimension):
        affine_box_document["dimension"] = dimension
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "dimension"

    def test_negative_weight(self, affine_box_document):
        affine_box_document["objective"] = {
            "variant": "weighted-sum",
            "params": {"terms": [{"weight": -1.0, "variant": "squared-norm"}]},
        }
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "objective.params.terms.0.weight"

    def test_yaml_syntax_error_has_line(self):
        with pytest.raises(ParseError) as exc_info:
            parse_instance_text("dimension: 2\nmap: [1, 2\nset: {}\n")
        assert not isinstance(exc_info.value, SchemaViolation)
        assert exc_info.value.line is not None

    def test_top_level_must_be_mapping(self):
        with pytest.raises(ParseError) as exc_info:
            parse_instance_text("- 1\n- 2\n")
        assert exc_info.value.line == 1

    def test_missing_file(self, temp_dir):
        with pytest.raises(ParseError):
            parse_instance(temp_dir / "absent.yaml")

    def test_non_monotone_map(self, affine_box_document):
        affine_box_document["map"]["params"]["M"] = [[-1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(MonotonicityViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.eigenvalue == pytest.approx(-1.0)

    def test_nonpositive_ball_radius_rejected(self, affine_box_document):
        affine_box_document["set"] = {
            "variant": "ball",
            "params": {"center": [0.0, 0.0], "radius": -1.0},
        }
        with pytest.raises(SchemaViolation) as exc_info:
            parse_instance_text(_dump(affine_box_document))
        assert exc_info.value.field == "set.params.radius"


class TestSerialization:
    def test_black_box_cannot_be_written(self):
        inst = ProblemInstance(
            objective=ConvexObjective.squared_norm(1),
            map=MonotoneMap.black_box(lambda x: x, 1),
            set=Box([0.0], [1.0]),
            dimension=1,
        )
        with pytest.raises(SchemaViolation) as exc_info:
            instance_document(inst)
        assert exc_info.value.field == "map"

    def test_document_is_plain_yaml(self, example_3_2):
        text = serialize_instance(example_3_2)
        data = yaml.safe_load(text)
        assert data["name"] == "example-3-2"
        assert data["set"] == {
            "variant": "box",
            "params": {"lower": [0.0, 0.0], "upper": [1.0, 1.0]},
        }


class TestDemoCatalog:
    def test_all_demos_build(self):
        for preset in DEMOS.values():
            inst = preset.instance()
            assert inst.validated
            assert inst.known_solution is not None

    def test_unknown_demo(self):
        with pytest.raises(KeyError, match="available"):
            get_demo("example-9-9")

    def test_demo_overrides_layer_over_base(self):
        cfg = get_demo("min-norm-lp").solve_config()
        assert cfg.epsilon0 == 0.1
        assert cfg.mu == 1e-5
        assert cfg.max_outer == 200

    def test_to_dict(self):
        data = get_demo("example-3-2").to_dict()
        assert data["name"] == "example-3-2"
        assert data["solve_overrides"] == {"x0": [1.0, 1.0]}

    def test_multi_step_schedules(self):
        for name in ("distance-estimation", "basis-pursuit"):
            cfg = get_demo(name).solve_config()
            assert cfg.mu == 1e-7
            assert 1.0 / cfg.epsilon(0) < 1.0 / cfg.epsilon(1)


class TestDemoOutcomes:
    """Each demo's shipped run ends where its expected outcome says"""

    @pytest.mark.parametrize("name", [d.value for d in DEMOS])
    def test_trace_matches_expected(self, demo_runs, name):
        expected = get_demo(name).expected
        inst, trace = demo_runs[name]
        assert len(trace) == expected["iterations"]
        assert np.allclose(trace.final_x, expected["x"], atol=1e-3)
        summary = trace.summary(inst)
        if "objective" in expected:
            assert summary["objective"] == pytest.approx(expected["objective"], abs=1e-2)
        if "distance" in expected:
            assert summary["distance"] == pytest.approx(expected["distance"], abs=1e-2)

    @pytest.mark.parametrize("name", ["example-3-1", "example-3-2"])
    def test_weak_bcq_matches_expected(self, name):
        preset = get_demo(name)
        diag = weak_bcq_check(preset.instance(), preset.expected["x"])
        assert diag.verdict.value == preset.expected["weak_bcq"]

    def test_expected_serialized(self):
        data = get_demo("distance-estimation").to_dict()
        assert data["expected"]["iterations"] == 2
