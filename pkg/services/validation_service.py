#!/usr/bin/env python3
"""
Fixture validation: run every oracle case and compare leakage values.

An oracle case names a fixture, a mode and either a fixed expected leakage
or a reference mode whose result the case must match. Sampled cases may set
``ci_tolerance`` to widen their tolerance to the half-width of the run's own
confidence interval.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from config import AnalysisConfig
from exceptions import FixtureMissingError, LeakageAnalysisError
from services.analysis_service import AnalysisService
from services.run_report import RunReport

logger = logging.getLogger(__name__)

DEFAULT_SUITE = "fixtures/oracles.json"


@dataclass(frozen=True)
class OracleCase:
    name: str
    file: str
    mode: str
    tolerance: float
    expected: Optional[float] = None
    reference_mode: Optional[str] = None
    constants: Dict[str, int] = field(default_factory=dict)
    samples: Optional[int] = None
    trace_cap: Optional[int] = None
    ci_tolerance: bool = False
    slow: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OracleCase":
        if data.get("expected") is None and data.get("reference_mode") is None:
            raise ValueError(f"oracle case {data.get('name')!r} has neither expected nor reference_mode")
        return cls(
            name=data["name"],
            file=data["file"],
            mode=data["mode"],
            tolerance=float(data["tolerance"]),
            expected=data.get("expected"),
            reference_mode=data.get("reference_mode"),
            constants={k: int(v) for k, v in data.get("constants", {}).items()},
            samples=data.get("samples"),
            trace_cap=data.get("trace_cap"),
            ci_tolerance=bool(data.get("ci_tolerance", False)),
            slow=bool(data.get("slow", False)),
        )


@dataclass
class CaseResult:
    name: str
    mode: str
    expected: Optional[float]
    actual: Optional[float]
    tolerance: float
    error: Optional[str] = None

    @property
    def delta(self) -> Optional[float]:
        if self.expected is None or self.actual is None:
            return None
        return abs(self.actual - self.expected)

    @property
    def passed(self) -> bool:
        return self.error is None and self.delta is not None and self.delta <= self.tolerance

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error:
            return f"{status} {self.name} [{self.mode}]: {self.error}"
        return (
            f"{status} {self.name} [{self.mode}]: expected {self.expected:.6f}, "
            f"got {self.actual:.6f} (delta {self.delta:.2e}, tolerance {self.tolerance:g})"
        )


@dataclass
class ValidationSummary:
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def failures(self) -> List[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def format_text(self) -> str:
        lines = [c.describe() for c in self.cases]
        lines.append(f"{len(self.cases) - len(self.failures)}/{len(self.cases)} cases passed")
        return "\n".join(lines) + "\n"


class ValidationService:
    """Runs oracle cases against the analysis pipeline."""

    def __init__(self, config: AnalysisConfig, suite_path: str = DEFAULT_SUITE):
        self.config = config
        self.suite_path = Path(suite_path)
        self.fixtures_dir = self.suite_path.parent
        self.logger = logging.getLogger(__name__)

    def load_suite(self) -> List[OracleCase]:
        """
        Read the oracle file and check that every fixture exists.

        Raises:
            FixtureMissingError: If the oracle file or a named fixture is absent
        """
        if not self.suite_path.exists():
            raise FixtureMissingError(str(self.suite_path))
        data = json.loads(self.suite_path.read_text(encoding="utf-8"))
        cases = [OracleCase.from_dict(c) for c in data.get("cases", [])]
        for case in cases:
            if not (self.fixtures_dir / case.file).exists():
                raise FixtureMissingError(str(self.fixtures_dir / case.file))
        return cases

    def report(self, case: OracleCase, mode: str) -> RunReport:
        config = replace(
            self.config,
            mode=mode,
            constants={**self.config.constants, **case.constants},
            total_samples=case.samples or self.config.total_samples,
            trace_cap=case.trace_cap or self.config.trace_cap,
        )
        config.validate()
        return AnalysisService(config).run(str(self.fixtures_dir / case.file)).report

    def leakage(self, case: OracleCase, mode: str) -> float:
        return self.report(case, mode).leakage_corrected

    def run_case(self, case: OracleCase) -> CaseResult:
        expected = case.expected
        tolerance = case.tolerance
        try:
            if expected is None:
                expected = self.leakage(case, case.reference_mode or case.mode)
            if case.ci_tolerance:
                report = self.report(case, case.mode)
                actual = report.leakage_corrected
                lo, hi = report.confidence_interval
                tolerance = max(tolerance, (hi - lo) / 2)
            else:
                actual = self.leakage(case, case.mode)
        except LeakageAnalysisError as e:
            self.logger.warning(f"Case {case.name} failed: {e}")
            return CaseResult(case.name, case.mode, expected, None, tolerance, str(e))
        result = CaseResult(case.name, case.mode, expected, actual, tolerance)
        self.logger.info(result.describe())
        return result

    def validate(
        self, include_slow: bool = False, names: Optional[Iterable[str]] = None
    ) -> ValidationSummary:
        """
        Run the suite.

        Args:
            include_slow: Also run cases marked slow
            names: Restrict to these case names

        Returns:
            ValidationSummary with one result per selected case

        Raises:
            FixtureMissingError: If the suite or a fixture file is missing
        """
        wanted = set(names) if names else None
        summary = ValidationSummary()
        for case in self.load_suite():
            if wanted is not None and case.name not in wanted:
                continue
            if case.slow and not include_slow and wanted is None:
                continue
            summary.cases.append(self.run_case(case))
        return summary
