"""
Tests for configuration loading
"""

from pathlib import Path

import pytest

from smpec.config import SmpecConfig, SolveConfig, load_config
from smpec.errors import ParseError, ValidationError

EXAMPLE_CONFIG = Path(__file__).parent.parent / "config" / "smpec.yaml"


class TestLoadConfig:
    def test_missing_file_gives_defaults(self, temp_dir):
        assert load_config(str(temp_dir / "absent.yaml")) == SmpecConfig()

    def test_example_config_matches_defaults(self):
        assert load_config(str(EXAMPLE_CONFIG)) == SmpecConfig()

    def test_partial_sections_keep_defaults(self, temp_dir):
        path = temp_dir / "config.yaml"
        path.write_text("smpec:\n  solver:\n    mu: 1.0e-4\n    subproblem: {max_inner: 50}\n")
        cfg = load_config(str(path))
        assert cfg.solver.mu == 1e-4
        assert cfg.solver.subproblem.max_inner == 50
        assert cfg.solver.epsilon0 == 1.0
        assert cfg.gap == SmpecConfig().gap

    def test_unknown_key_rejected(self, temp_dir):
        path = temp_dir / "config.yaml"
        path.write_text("smpec:\n  gap: {tolerance: 1}\n")
        with pytest.raises(ParseError, match="smpec.gap"):
            load_config(str(path))

    def test_invalid_yaml_has_line(self, temp_dir):
        path = temp_dir / "config.yaml"
        path.write_text("smpec:\n  solver: [1, 2\n")
        with pytest.raises(ParseError) as exc_info:
            load_config(str(path))
        assert exc_info.value.line is not None
        assert exc_info.value.exit_code == 2

    def test_non_mapping_rejected(self, temp_dir):
        path = temp_dir / "config.yaml"
        path.write_text("- smpec\n")
        with pytest.raises(ParseError):
            load_config(str(path))

    def test_round_trip_through_dict(self, smpec_config):
        assert SmpecConfig.from_dict(smpec_config.to_dict()) == smpec_config


class TestSolveConfig:
    def test_zero_mu_allowed_with_warning(self, caplog):
        SolveConfig(mu=0.0).validate()
        assert "mu = 0" in caplog.text

    def test_negative_step0_rejected(self):
        cfg = SolveConfig()
        cfg.subproblem.step0 = -1.0
        with pytest.raises(ValidationError):
            cfg.validate()
