"""Integration tests for the analysis pipeline."""

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from config import MODE_HYBRID, MODE_PRECISE, MODE_STATISTICAL
from exceptions import TraceBudgetExceededError
from services import AnalysisService, OutputPaths, analyze

COIN_LEAKAGE = 0.31127812445913283


@pytest.mark.integration
class TestPreciseMode:
    """Test fully exact runs."""

    def test_identity(self, make_config, write_program, identity_source):
        """Test a copied bit leaks exactly one bit."""
        report = analyze(write_program(identity_source), make_config(mode=MODE_PRECISE))
        assert report.leakage_corrected == pytest.approx(1.0)
        assert report.leakage_raw == pytest.approx(1.0)
        assert report.confidence_interval == pytest.approx((1.0, 1.0))
        assert report.prior_entropy == pytest.approx(1.0)
        assert report.posterior_entropy == pytest.approx(0.0)
        assert [c.method for c in report.components] == ["precise"]
        assert report.total_samples == 0
        assert report.warnings == []
        assert report.allocation_log == []

    def test_coin(self, make_config, write_program, coin_source):
        """Test exact leakage of a coin-guarded copy."""
        report = analyze(write_program(coin_source), make_config(mode=MODE_PRECISE))
        assert report.leakage_corrected == pytest.approx(COIN_LEAKAGE, abs=1e-12)

    def test_trace_cap(self, make_config, fixtures_dir):
        """Test a probabilistic loop cannot be enumerated."""
        config = make_config(mode=MODE_PRECISE, trace_cap=500)
        with pytest.raises(TraceBudgetExceededError):
            AnalysisService(config).run(str(fixtures_dir / "prob_termination.hyleak"))

    def test_constants_override(self, make_config, fixtures_dir):
        """Test --const values reach the preprocessor."""
        config = make_config(mode=MODE_PRECISE, constants={"N": 6, "K": 3})
        run = AnalysisService(config).run(str(fixtures_dir / "reservoir.hyleak"))
        assert len(run.joint.support_x) == 64
        assert run.report.leakage_corrected > 0.0


@pytest.mark.integration
class TestStatisticalMode:
    """Test purely sampled runs."""

    def test_known_prior_default(self, make_config, write_program, coin_source):
        """Test statistical mode samples each secret separately by default."""
        config = make_config(mode=MODE_STATISTICAL, total_samples=2000, realloc_fraction=0.25)
        report = analyze(write_program(coin_source), config)
        (component,) = report.components
        assert component.method == "sample_known_prior"
        assert report.total_samples == 2000
        assert len(report.allocation_log) == 4
        assert report.leakage_corrected == pytest.approx(COIN_LEAKAGE, abs=0.06)
        lo, hi = report.confidence_interval
        assert 0.0 <= lo <= hi

    def test_plain_estimator(self, make_config, write_program, coin_source):
        """Test the general estimator draws secrets from the prior."""
        config = make_config(mode=MODE_STATISTICAL, total_samples=2000, plain_estimator=True)
        report = analyze(write_program(coin_source), config)
        assert [c.method for c in report.components] == ["sample"]
        assert report.leakage_corrected == pytest.approx(COIN_LEAKAGE, abs=0.06)

    def test_corollary_reported(self, make_config, write_program, coin_source):
        """Test the corollary estimate is added on request."""
        config = make_config(mode=MODE_STATISTICAL, total_samples=1000, corollary=True)
        report = analyze(write_program(coin_source), config)
        assert report.corollary is not None
        assert "corollary" in report.to_dict()

    def test_reproducible(self, make_config, write_program, coin_source):
        """Test the same seed gives the same estimate."""
        path = write_program(coin_source)
        first = analyze(path, make_config(mode=MODE_STATISTICAL, total_samples=1000, seed=5))
        second = analyze(path, make_config(mode=MODE_STATISTICAL, total_samples=1000, seed=5))
        assert first.leakage_raw == second.leakage_raw


@pytest.mark.integration
class TestHybridMode:
    """Test decomposed runs."""

    def test_short_random_walk(self, make_config, fixtures_dir):
        """Test the hoisted walk matches the exact leakage."""
        path = str(fixtures_dir / "random_walk.hyleak")
        exact = analyze(path, make_config(mode=MODE_PRECISE, constants={"MAX": 2}))
        config = make_config(mode=MODE_HYBRID, constants={"MAX": 2}, total_samples=20000)
        report = analyze(path, config)
        assert [c.method for c in report.components] == ["sample_abs"] * 7
        assert {c.line for c in report.components} == {24}
        assert sum(c.weight for c in report.components) == pytest.approx(1.0)
        assert report.total_samples == 20000
        assert report.leakage_corrected == pytest.approx(exact.leakage_corrected, abs=0.03)

    def test_workers_do_not_change_counts(self, make_config, fixtures_dir):
        """Test per-component streams make results independent of the worker count."""
        path = str(fixtures_dir / "random_walk.hyleak")
        one = analyze(path, make_config(mode=MODE_HYBRID, constants={"MAX": 2}, total_samples=3000))
        four = analyze(
            path, make_config(mode=MODE_HYBRID, constants={"MAX": 2}, total_samples=3000, workers=4)
        )
        assert one.leakage_raw == four.leakage_raw
        assert [c.samples for c in one.components] == [c.samples for c in four.components]

    def test_executor_sized_by_workers(self, make_config, fixtures_dir, mocker):
        """Test every sampling batch runs on a pool of the configured size."""
        pool = mocker.patch(
            "services.analysis_service.ThreadPoolExecutor", wraps=ThreadPoolExecutor
        )
        config = make_config(mode=MODE_HYBRID, constants={"MAX": 2}, total_samples=3000, workers=3)
        analyze(str(fixtures_dir / "random_walk.hyleak"), config)
        assert pool.call_count >= 1
        assert all(call.kwargs == {"max_workers": 3} for call in pool.call_args_list)

    def test_precise_plan_without_sampling(self, make_config, fixtures_dir):
        """Test a program the decomposer keeps precise needs no samples."""
        report = analyze(str(fixtures_dir / "dining3.hyleak"), make_config(mode=MODE_HYBRID))
        assert report.total_samples == 0
        assert report.leakage_corrected == pytest.approx(0.8112781244591328, abs=1e-9)


@pytest.mark.integration
class TestOutputs:
    """Test artifact emission."""

    def test_all_artifacts(self, make_config, write_program, coin_source, temp_output_dir):
        """Test every enabled artifact is written under the output directory."""
        config = make_config(
            mode=MODE_PRECISE,
            emit_json=True,
            emit_cfg=True,
            emit_matrix=True,
            emit_pp=True,
            emit_traces=True,
        )
        path = write_program(coin_source, "coin.hyleak")
        service = AnalysisService(config)
        run = service.run(path)
        written = service.write_outputs(run, OutputPaths.from_config(config, path))

        out = Path(temp_output_dir)
        assert sorted(Path(p).name for p in written) == sorted([
            "coin.json",
            "coin.dot",
            "coin.matrix.csv",
            "coin.traces.csv",
            "coin.pp",
            "coin.components.pp",
        ])
        data = json.loads((out / "coin.json").read_text())
        assert data["schema_version"] == 1
        assert data["mode"] == MODE_PRECISE
        assert data["leakage"]["corrected"] == pytest.approx(COIN_LEAKAGE)
        assert (out / "coin.dot").read_text().startswith("digraph CFG {")
        assert len((out / "coin.traces.csv").read_text().strip().splitlines()) == 4

    def test_nothing_requested(self, make_config, write_program, identity_source):
        """Test no flags means no files."""
        config = make_config(mode=MODE_PRECISE)
        path = write_program(identity_source)
        service = AnalysisService(config)
        assert service.write_outputs(service.run(path), OutputPaths.from_config(config, path)) == []
