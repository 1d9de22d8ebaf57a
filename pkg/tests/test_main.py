"""Tests for the command-line entry points."""

import argparse
import json

import pytest

import validate_fixtures
from main import main, parse_constants


@pytest.fixture
def cli_args(tmp_path):
    """Common arguments keeping logs and artifacts inside the test directory."""
    return ["--log-dir", str(tmp_path / "logs"), "--output-dir", str(tmp_path / "out")]


@pytest.mark.unit
class TestParseConstants:
    """Test --const parsing."""

    def test_pairs(self):
        """Test NAME=VALUE pairs become integers."""
        assert parse_constants(["N=4", " K = -2"]) == {"N": 4, "K": -2}

    def test_missing_separator(self):
        """Test a bare name is rejected."""
        with pytest.raises(argparse.ArgumentTypeError, match="NAME=VALUE"):
            parse_constants(["N"])

    def test_not_an_integer(self):
        """Test a non-integer value is rejected."""
        with pytest.raises(argparse.ArgumentTypeError, match="not an integer"):
            parse_constants(["N=four"])


@pytest.mark.integration
class TestMain:
    """Test exit codes and output of the analyzer CLI."""

    def test_success(self, write_program, identity_source, cli_args, capsys):
        """Test a precise run prints the report and exits 0."""
        code = main([write_program(identity_source), "--mode", "precise"] + cli_args)
        out = capsys.readouterr().out
        assert code == 0
        assert "Leakage (mutual information): 1.000000 bits after bias correction" in out
        assert "Mode: precise" in out

    def test_json_written(self, write_program, identity_source, cli_args, tmp_path, capsys):
        """Test --json writes the report document."""
        target = tmp_path / "report.json"
        code = main([write_program(identity_source), "--mode", "precise", "--json", str(target)] + cli_args)
        assert code == 0
        assert json.loads(target.read_text())["leakage"]["corrected"] == pytest.approx(1.0)

    def test_syntax_error(self, write_program, cli_args, capsys):
        """Test a syntax error is printed as file:line:col and exits 1."""
        path = write_program("secret int1 h;\nobservable int1 o;\no := ;\n")
        code = main([path] + cli_args)
        err = capsys.readouterr().err
        assert code == 1
        assert err.startswith(f"{path}:3:")

    def test_bad_const(self, write_program, identity_source, cli_args, capsys):
        """Test a malformed --const exits 2."""
        code = main([write_program(identity_source), "--const", "N"] + cli_args)
        assert code == 2
        assert "NAME=VALUE" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, cli_args, capsys):
        """Test an unreadable source exits 1."""
        code = main([str(tmp_path / "nope.hyleak")] + cli_args)
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_invalid_configuration(self, write_program, identity_source, cli_args, capsys):
        """Test configuration errors exit 1 with the collected messages."""
        code = main([write_program(identity_source), "--samples", "0"] + cli_args)
        assert code == 1
        assert "HYLEAK_SAMPLES must be positive" in capsys.readouterr().err


@pytest.mark.integration
class TestValidateFixtures:
    """Test the oracle runner CLI."""

    def write_suite(self, tmp_path, identity_source, expected):
        (tmp_path / "copy.hyleak").write_text(identity_source)
        suite = tmp_path / "oracles.json"
        suite.write_text(json.dumps({"cases": [{
            "name": "copy", "file": "copy.hyleak", "mode": "precise",
            "expected": expected, "tolerance": 1e-9,
        }]}))
        return str(suite)

    def test_passing_suite(self, tmp_path, identity_source, monkeypatch, capsys):
        """Test a passing suite exits 0."""
        monkeypatch.chdir(tmp_path)
        code = validate_fixtures.main(["--suite", self.write_suite(tmp_path, identity_source, 1.0)])
        assert code == 0
        assert "1/1 cases passed" in capsys.readouterr().out

    def test_failing_suite(self, tmp_path, identity_source, monkeypatch, capsys):
        """Test a wrong oracle value exits 1."""
        monkeypatch.chdir(tmp_path)
        code = validate_fixtures.main(["--suite", self.write_suite(tmp_path, identity_source, 0.5)])
        assert code == 1
        assert "FAIL copy [precise]" in capsys.readouterr().out

    def test_missing_suite(self, tmp_path, monkeypatch, capsys):
        """Test a missing oracle file aborts with exit 1."""
        monkeypatch.chdir(tmp_path)
        assert validate_fixtures.main(["--suite", str(tmp_path / "none.json")]) == 1
        assert "Fixture not found" in capsys.readouterr().err
