"""Tests for report rendering."""

import json

import pytest

from estimation.report import MUTUAL_INFORMATION, SHANNON_ENTROPY, EstimateReport
from services import ComponentSummary, RunReport, format_text_report


def make_report(**overrides):
    fields = dict(
        file="walk.hyleak",
        mode="hybrid",
        seed=3,
        alpha=0.05,
        entropy=EstimateReport(SHANNON_ENTROPY, 2.0, 2.0, 0.0, (2.0, 2.0), 0.05),
        leakage=EstimateReport(
            MUTUAL_INFORMATION, 0.75, 0.7, 0.0004, (0.66, 0.74), 0.05,
            per_component_variance={1: 0.0004}, per_component_bias={1: 0.05},
            total_samples=500,
        ),
        components=[
            ComponentSummary(0, "precise", 0, 0.25),
            ComponentSummary(1, "sample", 12, 0.75, samples=500, variance=0.0004, bias=0.05),
        ],
    )
    fields.update(overrides)
    return RunReport(**fields)


@pytest.mark.unit
class TestRunReport:
    """Test derived quantities and JSON."""

    def test_entropies(self):
        """Test posterior entropy is prior entropy minus leakage."""
        report = make_report()
        assert report.posterior_entropy_raw == pytest.approx(1.25)
        assert report.posterior_entropy == pytest.approx(1.3)
        assert report.total_samples == 500

    def test_json_schema(self):
        """Test the JSON document carries the versioned fields."""
        data = json.loads(make_report().to_json())
        assert data["schema_version"] == 1
        assert data["leakage"] == {
            "raw": 0.75,
            "corrected": 0.7,
            "variance": 0.0004,
            "confidence_interval": [0.66, 0.74],
            "sample_adequate": True,
        }
        assert data["components"][1] == {
            "id": 1,
            "method": "sample",
            "line": 12,
            "weight": 0.75,
            "samples": 500,
            "variance": 0.0004,
            "bias": 0.05,
        }
        assert "corollary" not in data

    def test_corollary_included(self):
        """Test the corollary estimate is serialized when present."""
        corollary = EstimateReport(MUTUAL_INFORMATION, 0.75, 0.72, 0.0004, (0.68, 0.76), 0.05)
        data = make_report(corollary=corollary).to_dict()
        assert data["corollary"]["corrected_estimate"] == 0.72


@pytest.mark.unit
class TestTextReport:
    """Test the human-readable summary."""

    def test_lines(self):
        """Test the summary shows both leakage values and the interval."""
        text = format_text_report(make_report())
        assert "Leakage (mutual information): 0.750000 bits before bias correction" in text
        assert "Leakage (mutual information): 0.700000 bits after bias correction" in text
        assert "95% confidence interval: [0.660000, 0.740000]" in text
        assert "Prior Shannon entropy:      2.000000" in text
        assert text.endswith("\n")

    def test_warnings_listed(self):
        """Test warnings close the summary."""
        text = format_text_report(make_report(warnings=["too few samples"]))
        assert text.splitlines()[-1] == "WARNING: too few samples"

    def test_corollary_line(self):
        """Test the corollary estimate is shown when present."""
        corollary = EstimateReport(MUTUAL_INFORMATION, 0.75, 0.72, 0.0004, (0.68, 0.76), 0.05)
        text = format_text_report(make_report(corollary=corollary))
        assert "Corollary-mode estimate: 0.720000" in text
