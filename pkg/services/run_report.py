#!/usr/bin/env python3
"""
Report of one analysis run, rendered as text or as versioned JSON.

Both renderings read the same fields, so the numbers always agree.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from estimation.report import EstimateReport

SCHEMA_VERSION = 1


@dataclass
class ComponentSummary:
    """One analyzed component: the exact part or one saved state."""

    component_id: int
    method: str
    line: int
    weight: float
    samples: int = 0
    variance: float = 0.0
    bias: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.component_id,
            "method": self.method,
            "line": self.line,
            "weight": self.weight,
            "samples": self.samples,
            "variance": self.variance,
            "bias": self.bias,
        }


@dataclass
class RunReport:
    """
    Outcome of analyzing one program.

    The leakage is the mutual information between secret and observable in
    bits; the posterior entropy is derived as prior entropy minus leakage.
    """

    file: str
    mode: str
    seed: int
    alpha: float
    entropy: EstimateReport
    leakage: EstimateReport
    components: List[ComponentSummary] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    allocation_log: List[Dict[str, Any]] = field(default_factory=list)
    plan: Dict[str, Any] = field(default_factory=dict)
    corollary: Optional[EstimateReport] = None
    elapsed_seconds: float = 0.0

    @property
    def prior_entropy_raw(self) -> float:
        return self.entropy.raw_estimate

    @property
    def prior_entropy(self) -> float:
        return self.entropy.corrected_estimate

    @property
    def leakage_raw(self) -> float:
        return self.leakage.raw_estimate

    @property
    def leakage_corrected(self) -> float:
        return self.leakage.corrected_estimate

    @property
    def posterior_entropy_raw(self) -> float:
        return self.prior_entropy_raw - self.leakage_raw

    @property
    def posterior_entropy(self) -> float:
        return self.prior_entropy - self.leakage_corrected

    @property
    def confidence_interval(self) -> Tuple[float, float]:
        return self.leakage.confidence

    @property
    def total_samples(self) -> int:
        return sum(c.samples for c in self.components)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "file": self.file,
            "mode": self.mode,
            "seed": self.seed,
            "alpha": self.alpha,
            "prior_entropy": {"raw": self.prior_entropy_raw, "corrected": self.prior_entropy},
            "posterior_entropy": {
                "raw": self.posterior_entropy_raw,
                "corrected": self.posterior_entropy,
            },
            "leakage": {
                "raw": self.leakage_raw,
                "corrected": self.leakage_corrected,
                "variance": self.leakage.variance,
                "confidence_interval": list(self.confidence_interval),
                "sample_adequate": self.leakage.sample_adequate,
            },
            "total_samples": self.total_samples,
            "components": [c.to_dict() for c in self.components],
            "plan": self.plan,
            "allocation_log": self.allocation_log,
            "warnings": list(self.warnings),
            "elapsed_seconds": self.elapsed_seconds,
        }
        if self.corollary is not None:
            data["corollary"] = self.corollary.to_dict()
        return data

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)


def format_text_report(run: RunReport) -> str:
    """Human-readable summary of a run."""
    lines = [
        f"File: {run.file}",
        f"Mode: {run.mode}   seed: {run.seed}   samples: {run.total_samples}",
        "",
        f"Prior Shannon entropy:      {run.prior_entropy_raw:.6f}  (corrected {run.prior_entropy:.6f})",
        f"Posterior Shannon entropy:  {run.posterior_entropy_raw:.6f}  (corrected {run.posterior_entropy:.6f})",
        f"Leakage (mutual information): {run.leakage_raw:.6f} bits before bias correction",
        f"Leakage (mutual information): {run.leakage_corrected:.6f} bits after bias correction",
    ]
    lo, hi = run.confidence_interval
    lines.append(f"{(1 - run.alpha) * 100:g}% confidence interval: [{lo:.6f}, {hi:.6f}]")
    if run.corollary is not None:
        lines.append(f"Corollary-mode estimate: {run.corollary.corrected_estimate:.6f}")
    lines.append("")
    lines.append("Components:")
    for c in run.components:
        lines.append(
            f"  #{c.component_id:<3} {c.method:<11} line {c.line:<4} weight {c.weight:.6g}"
            f"  samples {c.samples}  variance {c.variance:.3e}  bias {c.bias:.3e}"
        )
    for w in run.warnings:
        lines.append(f"WARNING: {w}")
    return "\n".join(lines) + "\n"
