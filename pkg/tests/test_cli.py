"""
Tests for smpec CLI commands
"""

from pathlib import Path

import yaml

from smpec.config import SmpecConfig, load_config
from smpec.main import cli

from .test_instances import WRONG_SHAPE


def _write(name, document) -> str:
    with open(name, "w") as f:
        yaml.safe_dump(document, f, sort_keys=False)
    return name


class TestSmpecInit:
    """Test smpec init command"""

    def test_version(self, cli_runner):
        result = cli_runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "smpec" in result.output

    def test_init_writes_default_config(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["init"])

            assert result.exit_code == 0
            assert Path(".smpec/config.yaml").exists()
            assert Path(".smpec/demos").is_dir()
            assert load_config(".smpec/config.yaml") == SmpecConfig()

    def test_init_keeps_existing_config(self, cli_runner):
        with cli_runner.isolated_filesystem():
            cli_runner.invoke(cli, ["init"])
            Path(".smpec/config.yaml").write_text("smpec: {}\n")
            result = cli_runner.invoke(cli, ["init"])

            assert result.exit_code == 0
            assert "already exists" in result.output
            assert Path(".smpec/config.yaml").read_text() == "smpec: {}\n"

    def test_invalid_config_file(self, cli_runner):
        with cli_runner.isolated_filesystem():
            Path("bad.yaml").write_text("smpec:\n  solver: {bogus: 1}\n")
            result = cli_runner.invoke(cli, ["--config", "bad.yaml", "validate", "example-3-1"])
            assert result.exit_code == 2


class TestSmpecValidate:
    def test_valid_file(self, cli_runner, affine_box_document):
        with cli_runner.isolated_filesystem():
            path = _write("affine-box.yaml", affine_box_document)
            result = cli_runner.invoke(cli, ["validate", path])

            assert result.exit_code == 0
            assert "valid" in result.output

    def test_wrong_shape_exits_2(self, cli_runner):
        with cli_runner.isolated_filesystem():
            Path("wrong.yaml").write_text(WRONG_SHAPE)
            result = cli_runner.invoke(cli, ["validate", "wrong.yaml"])
            assert result.exit_code == 2

    def test_yaml_syntax_error_exits_2(self, cli_runner):
        with cli_runner.isolated_filesystem():
            Path("broken.yaml").write_text("dimension: 2\nmap: [1, 2\n")
            result = cli_runner.invoke(cli, ["validate", "broken.yaml"])
            assert result.exit_code == 2

    def test_non_monotone_exits_3(self, cli_runner, affine_box_document):
        affine_box_document["map"]["params"]["M"] = [[-1.0, 0.0], [0.0, 1.0]]
        with cli_runner.isolated_filesystem():
            path = _write("bad.yaml", affine_box_document)
            result = cli_runner.invoke(cli, ["validate", path])
            assert result.exit_code == 3


class TestSmpecGap:
    def test_gap_on_demo(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["gap", "example-3-1", "--point", "1"])

            assert result.exit_code == 0
            assert "g_D([1.0])" in result.output

    def test_point_outside_set_exits_3(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["gap", "example-3-2", "--point", "2,0"])
            assert result.exit_code == 3

    def test_malformed_point(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["gap", "example-3-1", "--point", "a,b"])
            assert result.exit_code == 2

    def test_point_of_wrong_length(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["gap", "example-3-2", "--point", "0"])
            assert result.exit_code == 2
            assert "expected 2 coordinate(s)" in result.output


class TestSmpecSolve:
    def test_solve_writes_trace(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(
                cli, ["solve", "example-3-2", "--trace", "t.csv", "--report", "s.yaml"]
            )

            assert result.exit_code == 0
            assert "threshold-met" in result.output
            lines = Path("t.csv").read_text().splitlines()
            assert lines[0].startswith("k,")
            assert yaml.safe_load(Path("s.yaml").read_text())["status"] == "threshold-met"

    def test_iteration_cap_is_not_an_error(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(
                cli,
                ["solve", "min-norm-lp", "--epsilon0", "1", "--mu", "0", "--max-outer", "3"],
            )

            assert result.exit_code == 0
            assert "iteration-cap after 3 iteration(s)" in result.output

    def test_invalid_override_exits_3(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["solve", "example-3-1", "--alpha", "2"])
            assert result.exit_code == 3

    def test_start_of_wrong_length(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["solve", "example-3-1", "--x0", "1,1"])
            assert result.exit_code == 2
            assert "--x0" in result.output

    def test_repeated_traces_are_byte_identical(self, cli_runner):
        with cli_runner.isolated_filesystem():
            for name in ("a.csv", "b.csv"):
                result = cli_runner.invoke(
                    cli, ["solve", "distance-estimation", "--trace", name]
                )
                assert result.exit_code == 0
            assert Path("a.csv").read_bytes() == Path("b.csv").read_bytes()
            assert len(Path("a.csv").read_text().splitlines()) == 3


class TestSmpecVi:
    def test_vi_on_demo(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["vi", "example-3-2"])
            assert result.exit_code == 0
            assert "VI solved" in result.output

    def test_start_of_wrong_length(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["vi", "example-3-2", "--x0", "1,0,0"])
            assert result.exit_code == 2
            assert isinstance(result.exception, SystemExit)


class TestSmpecCertify:
    def test_known_point_certified(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(
                cli, ["certify", "example-3-2", "--point", "0,0", "--report", "r.yaml"]
            )

            assert result.exit_code == 0
            assert "certified" in result.output
            assert Path("r.yaml").exists()

    def test_perturbed_point_exits_5(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["certify", "example-3-2", "--point", "0.1,0"])
            assert result.exit_code == 5
            assert "not certified" in result.output

    def test_point_of_wrong_length(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["certify", "example-3-2", "--point", "0,0,0"])
            assert result.exit_code == 2
            assert isinstance(result.exception, SystemExit)
            assert "--point" in result.output


class TestSmpecDemo:
    def test_demo_writes_artifacts(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["demo", "example-3-2", "--output-dir", "out"])

            assert result.exit_code == 0
            for suffix in (".yaml", ".trace.csv", ".report.yaml"):
                assert Path(f"out/example-3-2{suffix}").exists()

    def test_unknown_demo(self, cli_runner):
        with cli_runner.isolated_filesystem():
            result = cli_runner.invoke(cli, ["demo", "example-9-9"])
            assert result.exit_code == 2
