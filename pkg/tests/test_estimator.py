"""Tests for bias-corrected leakage estimation."""

import math
from fractions import Fraction

import pytest

from estimation import (
    BIAS_COROLLARY,
    BIAS_GENERAL,
    ComponentKind,
    ComponentResult,
    confidence_interval,
    corollary_bias,
    empirical_subdist,
    estimate_cond_entropy_known_prior,
    estimate_entropy,
    estimate_leakage,
    estimate_mi,
    estimate_mi_known_prior,
    fuse,
    merge_results,
)
from exceptions import (
    EstimationError,
    MissingPriorError,
    WeightSumMismatchError,
    ZeroImportanceMassError,
    ZeroSampleSizeError,
)

IDENTITY = {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}


@pytest.mark.unit
class TestCorollaryReduction:
    """Test the general bias against the all-positive simplification."""

    def test_general_bias_equals_corollary(self):
        """Test one sampled component over a positive 2x2 joint with 100 runs."""
        counts = {(0, 0): 40, (0, 1): 10, (1, 0): 20, (1, 1): 30}
        report = estimate_mi([ComponentResult.sampled(1, 1.0, counts)])

        assert report.per_component_bias[1] == pytest.approx(0.005, abs=1e-12)
        assert corollary_bias(2, 2, 100) == pytest.approx(0.005, abs=1e-12)
        assert report.bias_correction == pytest.approx(0.005, abs=1e-12)

    def test_corollary_mode_matches(self):
        """Test the corollary mode gives the same correction here."""
        counts = {(0, 0): 40, (0, 1): 10, (1, 0): 20, (1, 1): 30}
        general = estimate_mi([ComponentResult.sampled(1, 1.0, counts)], bias_mode=BIAS_GENERAL)
        corollary = estimate_mi([ComponentResult.sampled(1, 1.0, counts)], bias_mode=BIAS_COROLLARY)
        assert corollary.corrected_estimate == pytest.approx(general.corrected_estimate, abs=1e-12)
        assert corollary.bias_mode == BIAS_COROLLARY

    def test_corollary_counts_observed_supports(self):
        """Test the corollary correction uses the secrets and observables actually seen."""
        counts = {(0, 0): 30, (1, 1): 50, (2, 0): 20, (2, 2): 0}
        report = estimate_mi([ComponentResult.sampled(1, 1.0, counts)], bias_mode=BIAS_COROLLARY)
        assert report.bias_correction == pytest.approx(corollary_bias(3, 2, 100), abs=1e-12)
        assert report.bias_correction == pytest.approx(0.01, abs=1e-12)
        assert report.corrected_estimate == pytest.approx(report.raw_estimate - 0.01, abs=1e-12)


@pytest.mark.unit
class TestExactResults:
    """Test estimation when every component is precise."""

    def test_exact_identity(self):
        """Test exact results carry no bias and no variance."""
        report = estimate_mi([ComponentResult.exact(0, IDENTITY)])
        assert report.raw_estimate == pytest.approx(1.0)
        assert report.corrected_estimate == report.raw_estimate
        assert report.variance == 0.0
        assert report.confidence == (report.corrected_estimate, report.corrected_estimate)
        assert report.total_samples == 0

    def test_split_exact_components(self):
        """Test two exact parts fuse into the identity channel."""
        results = [
            ComponentResult.exact(0, {(0, 0): Fraction(1, 2)}),
            ComponentResult.exact(1, {(1, 1): Fraction(1, 2)}),
        ]
        assert estimate_mi(results).raw_estimate == pytest.approx(1.0)

    def test_weights_must_sum_to_one(self):
        """Test that missing components are detected."""
        with pytest.raises(WeightSumMismatchError):
            fuse([ComponentResult.exact(0, {(0, 0): Fraction(1, 2)})])


@pytest.mark.unit
class TestSampledResults:
    """Test standard and abstract sampled components."""

    def test_sampled_identity(self):
        """Test a sampled identity channel with its negative bias."""
        report = estimate_mi([ComponentResult.sampled(1, 1.0, {(0, 0): 50, (1, 1): 50})])
        assert report.raw_estimate == pytest.approx(1.0)
        assert report.per_component_bias[1] == pytest.approx(-0.005)
        assert report.corrected_estimate == pytest.approx(1.005)
        assert report.variance == pytest.approx(0.0, abs=1e-15)

    def test_hybrid_mixture(self):
        """Test an exact half plus a sampled half."""
        results = [
            ComponentResult.exact(0, {(0, 0): Fraction(1, 4), (1, 0): Fraction(1, 4)}),
            ComponentResult.sampled(1, Fraction(1, 2), {(0, 1): 30, (1, 2): 30, (1, 1): 40}),
        ]
        report = estimate_mi(results)
        assert set(report.per_component_bias) == {1}
        assert report.variance >= 0
        assert report.total_samples == 100
        lo, hi = report.confidence
        assert 0 <= lo <= hi

    def test_abstract_sampled_matches_sampled_on_independent_output(self):
        """Test abstraction reproduces the prior exactly."""
        abstract = ComponentResult.abstract_sampled(
            1, 1.0, {0: 60, 1: 40}, {0: Fraction(1, 2), 1: Fraction(1, 2)}
        )
        sub = empirical_subdist(abstract)
        assert sub.mass[(0, 0)] == pytest.approx(0.3)
        assert sub.mass[(1, 1)] == pytest.approx(0.2)
        report = estimate_mi([abstract])
        assert report.raw_estimate == pytest.approx(0.0, abs=1e-12)

    def test_zero_samples_rejected(self):
        """Test that a statistical component with no runs is rejected."""
        with pytest.raises(ZeroSampleSizeError):
            empirical_subdist(ComponentResult.sampled(3, 1.0, {}))

    def test_entropy_estimate(self):
        """Test the prior entropy of sampled uniform bits."""
        report = estimate_entropy([ComponentResult.sampled(1, 1.0, {(0, 0): 50, (1, 1): 50})])
        assert report.raw_estimate == pytest.approx(1.0)
        # Plug-in entropy underestimates, so the correction raises it
        assert report.corrected_estimate > report.raw_estimate

    def test_small_sample_flagged(self):
        """Test the 4*#X*#Y guideline."""
        report = estimate_mi([ComponentResult.sampled(1, 1.0, {(0, 0): 2, (1, 1): 2, (0, 1): 1})])
        assert report.sample_adequate is False


@pytest.mark.unit
class TestKnownPrior:
    """Test the known-prior estimator."""

    def test_deterministic_rows(self):
        """Test a deterministic channel has no bias and no variance."""
        result = ComponentResult.known_prior(1, {0: 0.5, 1: 0.5}, {(0, 0): 50, (1, 1): 50})
        report = estimate_mi_known_prior([result])
        assert report.raw_estimate == pytest.approx(1.0)
        assert report.corrected_estimate == pytest.approx(1.0)
        assert report.variance == pytest.approx(0.0, abs=1e-15)

    def test_conditional_entropy_complements_mi(self):
        """Test H(X|Y) = H(X) - I(X;Y) under a known prior."""
        result = ComponentResult.known_prior(
            1, {0: 0.5, 1: 0.5}, {(0, 0): 30, (0, 1): 20, (1, 1): 50}
        )
        mi = estimate_mi_known_prior([result])
        h = estimate_cond_entropy_known_prior([result])
        assert h.corrected_estimate == pytest.approx(1.0 - mi.corrected_estimate)
        assert h.variance == pytest.approx(mi.variance)

    def test_unsampled_input_rejected(self):
        """Test that a prior input without samples is an error."""
        result = ComponentResult.known_prior(1, {0: 0.5, 1: 0.5}, {(0, 0): 10})
        with pytest.raises(ZeroImportanceMassError):
            estimate_mi_known_prior([result])

    def test_missing_prior_rejected(self):
        """Test that sampled secrets need prior mass."""
        result = ComponentResult(
            kind=ComponentKind.SAMPLED_KNOWN_PRIOR,
            component_id=1,
            weight=1.0,
            counts={(0, 0): 5, (2, 0): 5},
            input_weights={0: 1.0},
            input_sizes={0: 5},
        )
        with pytest.raises(MissingPriorError):
            estimate_mi_known_prior([result])

    def test_general_estimator_refuses_known_prior(self):
        """Test the general estimator does not silently accept per-input weights."""
        result = ComponentResult.known_prior(1, {0: 0.5, 1: 0.5}, {(0, 0): 5, (1, 1): 5})
        with pytest.raises(EstimationError):
            estimate_mi([result])

    def test_leakage_dispatch(self):
        """Test estimate_leakage picks the known-prior estimator."""
        result = ComponentResult.known_prior(1, {0: 0.5, 1: 0.5}, {(0, 0): 50, (1, 1): 50})
        entropy, mi = estimate_leakage([result])
        assert mi.corrected_estimate == pytest.approx(1.0)
        assert entropy.raw_estimate == pytest.approx(1.0)


@pytest.mark.unit
class TestMerging:
    """Test accumulation of batch results."""

    def test_counts_accumulate(self):
        """Test two batches of one component add up."""
        first = ComponentResult.sampled(1, 0.5, {(0, 0): 3})
        second = ComponentResult.sampled(1, 0.5, {(0, 0): 2, (1, 0): 5})
        merged = merge_results(merge_results(None, [first]), [second])
        assert merged[1].counts == {(0, 0): 5, (1, 0): 5}
        assert merged[1].sample_size == 10

    def test_mismatched_kinds_rejected(self):
        """Test results of different kinds never merge."""
        sampled = ComponentResult.sampled(1, 1.0, {(0, 0): 1})
        abstract = ComponentResult.abstract_sampled(1, 1.0, {0: 1}, {0: 1})
        with pytest.raises(EstimationError):
            sampled.merged_with(abstract)


@pytest.mark.unit
class TestConfidenceInterval:
    """Test the normal-approximation interval."""

    def test_symmetric_interval(self):
        """Test the 95% half width."""
        lo, hi = confidence_interval(1.0, 0.01, 0.05)
        assert lo == pytest.approx(1.0 - 1.959964 * 0.1, abs=1e-6)
        assert hi == pytest.approx(1.0 + 1.959964 * 0.1, abs=1e-6)

    def test_lower_bound_clamped(self):
        """Test the lower bound never goes below zero."""
        lo, hi = confidence_interval(0.01, 1.0, 0.05)
        assert lo == 0.0
        assert hi > 0.01

    def test_negative_estimate(self):
        """Test a negative point estimate keeps upper >= lower."""
        lo, hi = confidence_interval(-5.0, 0.0, 0.05)
        assert (lo, hi) == (0.0, 0.0)

    def test_negative_estimate_keeps_half_width(self):
        """Test a slightly negative estimate still reports the positive part of its interval."""
        lo, hi = confidence_interval(-0.01, 0.0001, 0.05)
        assert lo == 0.0
        assert hi == pytest.approx(-0.01 + 1.959964 * 0.01, abs=1e-6)
        assert confidence_interval(-0.05, 0.0001, 0.05) == (0.0, 0.0)

    def test_bad_variance(self):
        """Test negative variance is rejected."""
        with pytest.raises(ValueError):
            confidence_interval(0.0, -1.0, 0.05)

    def test_half_width_shrinks_with_samples(self):
        """Test more samples give a narrower interval."""
        small = estimate_mi([ComponentResult.sampled(1, 1.0, {(0, 0): 40, (0, 1): 10, (1, 0): 20, (1, 1): 30})])
        large = estimate_mi([ComponentResult.sampled(1, 1.0, {(0, 0): 400, (0, 1): 100, (1, 0): 200, (1, 1): 300})])
        assert large.variance == pytest.approx(small.variance / 10)
        assert math.isclose(large.raw_estimate, small.raw_estimate)
