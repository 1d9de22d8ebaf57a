#!/usr/bin/env python3
"""
Estimate reports: point estimates, variances and confidence intervals.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from scipy.stats import norm

# Quantities an EstimateReport can describe
MUTUAL_INFORMATION = "mutual_information"
SHANNON_ENTROPY = "shannon_entropy"
CONDITIONAL_ENTROPY = "conditional_entropy"

# Bias correction modes
BIAS_GENERAL = "general"
BIAS_COROLLARY = "corollary"


def z_score(alpha: float) -> float:
    """Two-sided standard normal quantile z_{alpha/2}."""
    return float(norm.ppf(1.0 - alpha / 2.0))


def confidence_interval(pe: float, v: float, alpha: float) -> Tuple[float, float]:
    """
    (1 - alpha) confidence interval around a point estimate.

    The lower bound is clamped at zero; the upper bound never falls below it.

    Args:
        pe: Bias-corrected point estimate
        v: Estimated variance (>= 0)
        alpha: Significance level in (0, 1)

    Returns:
        (lower, upper)
    """
    if v < 0:
        raise ValueError(f"variance must be non-negative (got {v})")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1) (got {alpha})")
    half_width = z_score(alpha) * math.sqrt(v)
    lower = max(0.0, pe - half_width)
    upper = max(lower, pe + half_width)
    return lower, upper


@dataclass
class EstimatorIntermediates:
    """Kernel arrays per component id, kept for diagnostics and tests."""

    per_component: Dict[int, Dict[str, Any]] = field(default_factory=dict)


@dataclass
class EstimateReport:
    """Raw and bias-corrected estimate of one information measure."""

    quantity: str
    raw_estimate: float
    corrected_estimate: float
    variance: float
    confidence: Tuple[float, float]
    alpha: float
    per_component_variance: Dict[int, float] = field(default_factory=dict)
    per_component_bias: Dict[int, float] = field(default_factory=dict)
    sample_adequate: bool = True
    total_samples: int = 0
    bias_mode: str = BIAS_GENERAL
    intermediates: Optional[EstimatorIntermediates] = field(
        default=None, repr=False, compare=False
    )

    @property
    def clamped_estimate(self) -> float:
        return max(0.0, self.corrected_estimate)

    @property
    def lower(self) -> float:
        return self.confidence[0]

    @property
    def upper(self) -> float:
        return self.confidence[1]

    @property
    def bias_correction(self) -> float:
        return self.raw_estimate - self.corrected_estimate

    def to_dict(self) -> Dict[str, Any]:
        return {
            "quantity": self.quantity,
            "raw_estimate": self.raw_estimate,
            "corrected_estimate": self.corrected_estimate,
            "clamped_estimate": self.clamped_estimate,
            "variance": self.variance,
            "confidence": [self.confidence[0], self.confidence[1]],
            "alpha": self.alpha,
            "per_component_variance": {str(k): v for k, v in self.per_component_variance.items()},
            "per_component_bias": {str(k): v for k, v in self.per_component_bias.items()},
            "sample_adequate": self.sample_adequate,
            "total_samples": self.total_samples,
            "bias_mode": self.bias_mode,
        }
