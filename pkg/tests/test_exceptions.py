"""Tests for custom exception types."""

import pytest

from exceptions import (
    AllocationError,
    BudgetTooSmallError,
    ConfigurationError,
    DistributionError,
    EngineError,
    EstimationError,
    FixtureMissingError,
    FrontendError,
    LeakageAnalysisError,
    LexError,
    MissingPriorError,
    NegativeMassError,
    ParseError,
    PipelineError,
    PreprocessError,
    ProgramRuntimeError,
    TimeoutExceededError,
    TraceBudgetExceededError,
    UnboundConstError,
    WeightSumMismatchError,
    ZeroSampleSizeError,
)


@pytest.mark.unit
class TestBaseException:
    """Test the base LeakageAnalysisError exception."""

    def test_basic_exception(self):
        """Test basic exception creation with message."""
        exc = LeakageAnalysisError("Test error")
        assert exc.message == "Test error"
        assert exc.details is None
        assert str(exc) == "Test error"

    def test_exception_with_details(self):
        """Test exception with details."""
        exc = LeakageAnalysisError("Test error", "Additional details")
        assert exc.details == "Additional details"
        assert str(exc) == "Test error\nDetails: Additional details"

    def test_exception_inheritance(self):
        """Test that every family inherits from the base."""
        for family in (
            ConfigurationError,
            DistributionError,
            EstimationError,
            AllocationError,
            FrontendError,
            EngineError,
            PipelineError,
        ):
            assert issubclass(family, LeakageAnalysisError)

    def test_configuration_error_is_value_error(self):
        """Test that configuration errors can be caught as ValueError."""
        with pytest.raises(ValueError):
            raise ConfigurationError("bad")


@pytest.mark.unit
class TestDistributionErrors:
    """Test distribution exception types."""

    def test_weight_sum_mismatch(self):
        """Test that the offending sum is kept."""
        exc = WeightSumMismatchError(0.9, 1e-9)
        assert exc.weight_sum == 0.9
        assert exc.tolerance == 1e-9
        assert "0.9" in exc.message
        assert isinstance(exc, DistributionError)

    def test_negative_mass(self):
        """Test that the cell and value are kept."""
        exc = NegativeMassError((1, 2), -0.5)
        assert exc.cell == (1, 2)
        assert exc.value == -0.5


@pytest.mark.unit
class TestEstimationErrors:
    """Test estimator and allocator exception types."""

    def test_zero_sample_size(self):
        """Test the component is named."""
        exc = ZeroSampleSizeError(3)
        assert exc.component == 3
        assert "3" in exc.message

    def test_missing_prior_details(self):
        """Test that the component goes into details."""
        exc = MissingPriorError(7, component=2)
        assert exc.secret == 7
        assert exc.details == "component 2"

    def test_budget_too_small(self):
        """Test the budget arithmetic is reported."""
        exc = BudgetTooSmallError(5, 10, 1)
        assert (exc.budget, exc.components, exc.floor) == (5, 10, 1)
        assert isinstance(exc, AllocationError)


@pytest.mark.unit
class TestFrontendErrors:
    """Test source-positioned exception types."""

    def test_position_in_message(self):
        """Test file:line:col prefix."""
        exc = ParseError("expected ';'", 3, 7, "prog.hyleak")
        assert str(exc) == "prog.hyleak:3:7: expected ';'"
        assert (exc.line, exc.column) == (3, 7)

    def test_with_filename(self):
        """Test re-anchoring an error to a file."""
        exc = UnboundConstError("N", 2, 1).with_filename("walk.hyleak")
        assert exc.name == "N"
        assert str(exc).startswith("walk.hyleak:2:1: Constant 'N' has no value")
        assert isinstance(exc, PreprocessError)

    def test_lex_error_family(self):
        """Test lexer errors are frontend errors."""
        assert issubclass(LexError, FrontendError)


@pytest.mark.unit
class TestEngineAndPipelineErrors:
    """Test engine and pipeline exception types."""

    def test_trace_budget(self):
        """Test the cap and the hybrid hint."""
        exc = TraceBudgetExceededError(1000)
        assert exc.cap == 1000
        assert "hybrid" in exc.details

    def test_program_runtime_error(self):
        """Test the line is kept."""
        exc = ProgramRuntimeError("division by zero", 12)
        assert exc.line == 12
        assert "line 12" in exc.message

    def test_timeout(self):
        """Test the cap is kept."""
        exc = TimeoutExceededError(2.5)
        assert exc.seconds == 2.5
        assert isinstance(exc, PipelineError)

    def test_fixture_missing(self):
        """Test the path is kept."""
        exc = FixtureMissingError("fixtures/none.hyleak")
        assert exc.path == "fixtures/none.hyleak"
        assert "fixtures/none.hyleak" in str(exc)
