"""Pytest configuration and shared fixtures."""

import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from config import AnalysisConfig  # noqa: E402

FIXTURES_DIR = ROOT / "fixtures"


@pytest.fixture
def fixtures_dir():
    """Directory holding the checked-in fixture programs."""
    return FIXTURES_DIR


@pytest.fixture
def temp_output_dir(tmp_path):
    """Provide a temporary output directory for artifacts."""
    output_dir = tmp_path / "output"
    output_dir.mkdir()
    return str(output_dir)


@pytest.fixture
def make_config(temp_output_dir):
    """Factory for validated configurations writing into a temporary directory."""

    def _make(**overrides):
        config = AnalysisConfig(output_dir=temp_output_dir, workers=1, seed=0)
        for key, value in overrides.items():
            setattr(config, key, value)
        config.validate()
        return config

    return _make


@pytest.fixture
def write_program(tmp_path):
    """Write program source to a temporary .hyleak file and return its path."""

    def _write(source, name="program.hyleak"):
        path = tmp_path / name
        path.write_text(source, encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture
def identity_source():
    """One secret bit copied straight to the observable."""
    return (
        "secret int1 h;\n"
        "observable int1 o;\n"
        "o := h;\n"
        "return;\n"
    )


@pytest.fixture
def coin_source():
    """A fair coin that hides one secret bit half of the time."""
    return (
        "secret int1 h;\n"
        "public int1 c;\n"
        "observable int1 o;\n"
        "c := randombit(0.5);\n"
        "if c == 1 then\n"
        "  o := h;\n"
        "else\n"
        "  o := 0;\n"
        "fi\n"
        "return;\n"
    )


@pytest.fixture(autouse=True)
def _clean_hyleak_env(monkeypatch):
    """Keep HYLEAK_* variables from the developer shell out of tests."""
    for key in list(os.environ):
        if key.startswith("HYLEAK_"):
            monkeypatch.delenv(key, raising=False)
