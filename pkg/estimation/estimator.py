#!/usr/bin/env python3
"""
Bias-corrected leakage estimation from mixed precise/statistical results.

Exact components contribute no noise. Every statistical component adds a
first-order bias term and a variance term; the corrected point estimate is
the raw plug-in value minus the summed biases, and the confidence interval
assumes normality of the estimator.
"""

import logging
from typing import List, Sequence, Tuple

from distributions.joint import JointDistribution, compose_joint
from distributions.measures import mutual_information, shannon_entropy
from estimation.components import ComponentKind, ComponentResult, split_weight, to_subdist
from estimation.kernels import (
    FusedArrays,
    KernelTerms,
    abstract_terms,
    component_matrix,
    entropy_terms,
    input_prior_vector,
    known_prior_terms,
    output_vector,
    sampled_terms,
)
from estimation.report import (
    BIAS_COROLLARY,
    BIAS_GENERAL,
    CONDITIONAL_ENTROPY,
    MUTUAL_INFORMATION,
    SHANNON_ENTROPY,
    EstimateReport,
    EstimatorIntermediates,
    confidence_interval,
)
from exceptions import EstimationError, MissingPriorError, WeightSumMismatchError

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-9


def corollary_bias(nx: int, ny: int, n: int) -> float:
    """(nx - 1)(ny - 1) / 2n, the all-cells-positive bias approximation."""
    return (nx - 1) * (ny - 1) / (2.0 * n)


def fuse(results: Sequence[ComponentResult]) -> JointDistribution:
    """
    Joint distribution of a complete set of component results.

    Raises:
        WeightSumMismatchError: If the component weights do not sum to 1
        EmptySupportError: If no cell has positive probability
    """
    if not results:
        raise WeightSumMismatchError(0.0, WEIGHT_TOLERANCE)
    weight_sum, _ = split_weight(results)
    if abs(weight_sum - 1.0) > WEIGHT_TOLERANCE:
        raise WeightSumMismatchError(weight_sum, WEIGHT_TOLERANCE)
    return compose_joint([to_subdist(r) for r in results if r.weight > 0])


def _ordered(results: Sequence[ComponentResult]) -> List[ComponentResult]:
    return sorted(results, key=lambda r: r.component_id)


def component_mi_terms(c: ComponentResult, joint: JointDistribution, f: FusedArrays) -> KernelTerms:
    """Kernel terms of one statistical component for mutual information."""
    theta = float(c.weight)
    n = c.sample_size
    if c.kind is ComponentKind.ABSTRACT_SAMPLED:
        return abstract_terms(input_prior_vector(c, joint), output_vector(c, joint), theta, n, f)
    if c.kind is ComponentKind.SAMPLED:
        return sampled_terms(component_matrix(c, joint), theta, n, f)
    raise EstimationError(
        f"Component {c.component_id} ({c.kind.value}) needs the known-prior estimator"
    )


def _finish(
    quantity: str,
    raw: float,
    biases: dict,
    variances: dict,
    alpha: float,
    joint: JointDistribution,
    total_samples: int,
    bias_mode: str,
    intermediates: EstimatorIntermediates,
    sign: float = 1.0,
) -> EstimateReport:
    """Assemble a report; ``sign`` flips the correction for measures whose bias is negative."""
    if bias_mode == BIAS_COROLLARY and total_samples > 0:
        nx, ny = len(joint.support_x), len(joint.support_y)
        correction = corollary_bias(nx, ny, total_samples)
    else:
        correction = sum(biases[k] for k in sorted(biases))
    corrected = raw - sign * correction
    variance = sum(variances[k] for k in sorted(variances))
    nx, ny = joint.domain.shape
    adequate = total_samples == 0 or total_samples >= 4 * nx * ny
    if not adequate:
        logger.warning(
            f"{quantity}: {total_samples} samples is below the 4*#X*#Y = {4 * nx * ny} guideline"
        )
    return EstimateReport(
        quantity=quantity,
        raw_estimate=raw,
        corrected_estimate=corrected,
        variance=variance,
        confidence=confidence_interval(corrected, variance, alpha),
        alpha=alpha,
        per_component_variance=variances,
        per_component_bias=biases,
        sample_adequate=adequate,
        total_samples=total_samples,
        bias_mode=bias_mode,
        intermediates=intermediates,
    )


def estimate_mi(
    results: Sequence[ComponentResult],
    alpha: float = 0.05,
    bias_mode: str = BIAS_GENERAL,
) -> EstimateReport:
    """
    Bias-corrected mutual information of exact, sampled and abstract-sampled components.

    Args:
        results: Results of all components (weights summing to 1)
        alpha: Significance level of the confidence interval
        bias_mode: BIAS_GENERAL (kernel correction) or BIAS_COROLLARY (comparison mode)

    Returns:
        EstimateReport for I(X; Y)

    Raises:
        WeightSumMismatchError: If the weights do not sum to 1
        EmptySupportError: If the fused joint has no positive cell
    """
    results = _ordered(results)
    joint = fuse(results)
    f = FusedArrays.from_joint(joint)
    raw = mutual_information(joint)

    biases, variances = {}, {}
    intermediates = EstimatorIntermediates()
    total = 0
    for c in results:
        if not c.is_statistical or c.weight == 0:
            continue
        terms = component_mi_terms(c, joint, f)
        theta = float(c.weight)
        biases[c.component_id] = terms.bias
        variances[c.component_id] = theta * theta * terms.spread / c.sample_size
        intermediates.per_component[c.component_id] = terms.kernels
        total += c.sample_size

    report = _finish(
        MUTUAL_INFORMATION, raw, biases, variances, alpha, joint, total, bias_mode, intermediates
    )
    logger.debug(
        f"MI estimate: raw={raw:.6f} corrected={report.corrected_estimate:.6f} "
        f"variance={report.variance:.3e}"
    )
    return report


def estimate_entropy(
    results: Sequence[ComponentResult],
    alpha: float = 0.05,
) -> EstimateReport:
    """
    Bias-corrected Shannon entropy of the secret marginal.

    Abstract-sampled and known-prior components reproduce the secret prior
    exactly, so only standard sampled components add bias and variance.

    Raises:
        WeightSumMismatchError: If the weights do not sum to 1
    """
    results = _ordered(results)
    joint = fuse(results)
    f = FusedArrays.from_joint(joint)
    raw = shannon_entropy(joint.px)

    biases, variances = {}, {}
    intermediates = EstimatorIntermediates()
    total = 0
    for c in results:
        if c.kind is not ComponentKind.SAMPLED or c.weight == 0:
            continue
        theta = float(c.weight)
        dx = component_matrix(c, joint).sum(axis=1)
        terms = entropy_terms(dx, theta, c.sample_size, f)
        biases[c.component_id] = terms.bias
        variances[c.component_id] = theta * theta * terms.spread / c.sample_size
        intermediates.per_component[c.component_id] = terms.kernels
        total += c.sample_size

    return _finish(
        SHANNON_ENTROPY, raw, biases, variances, alpha, joint, total, BIAS_GENERAL, intermediates
    )


def _check_known_prior(results: Sequence[ComponentResult]) -> None:
    for c in results:
        if c.kind is ComponentKind.EXACT:
            continue
        if c.kind is not ComponentKind.SAMPLED_KNOWN_PRIOR:
            raise EstimationError(
                f"Component {c.component_id} ({c.kind.value}) is not a known-prior result"
            )
        for x, _ in c.counts:
            if x not in c.input_weights:
                raise MissingPriorError(x, c.component_id)


def estimate_mi_known_prior(
    results: Sequence[ComponentResult],
    alpha: float = 0.05,
    bias_mode: str = BIAS_GENERAL,
) -> EstimateReport:
    """
    Mutual information when the prior mass of every secret is known exactly.

    Args:
        results: Known-prior and exact results
        alpha: Significance level
        bias_mode: BIAS_GENERAL (M kernel) or BIAS_COROLLARY (comparison mode)

    Raises:
        MissingPriorError: If a sampled secret has no prior mass
        ZeroImportanceMassError: If a secret with prior mass was never sampled
    """
    results = _ordered(results)
    _check_known_prior(results)
    joint = fuse(results)
    f = FusedArrays.from_joint(joint)
    raw = mutual_information(joint)

    biases, variances = {}, {}
    intermediates = EstimatorIntermediates()
    total = 0
    for c in results:
        if c.kind is not ComponentKind.SAMPLED_KNOWN_PRIOR:
            continue
        terms = known_prior_terms(c, joint, f)
        biases[c.component_id] = terms.bias
        variances[c.component_id] = terms.spread
        intermediates.per_component[c.component_id] = terms.kernels
        total += c.sample_size

    return _finish(
        MUTUAL_INFORMATION, raw, biases, variances, alpha, joint, total, bias_mode, intermediates
    )


def estimate_cond_entropy_known_prior(
    results: Sequence[ComponentResult],
    alpha: float = 0.05,
    bias_mode: str = BIAS_GENERAL,
) -> EstimateReport:
    """
    H(X | Y) = H(X) - I(X; Y) with the known-prior mutual information estimate.

    The variance equals that of the mutual information estimate since H(X) is exact.
    """
    mi = estimate_mi_known_prior(results, alpha, bias_mode)
    hx = shannon_entropy(fuse(_ordered(results)).px)
    corrected = hx - mi.corrected_estimate
    return EstimateReport(
        quantity=CONDITIONAL_ENTROPY,
        raw_estimate=hx - mi.raw_estimate,
        corrected_estimate=corrected,
        variance=mi.variance,
        confidence=confidence_interval(corrected, mi.variance, alpha),
        alpha=alpha,
        per_component_variance=dict(mi.per_component_variance),
        per_component_bias={k: -v for k, v in mi.per_component_bias.items()},
        sample_adequate=mi.sample_adequate,
        total_samples=mi.total_samples,
        bias_mode=bias_mode,
        intermediates=mi.intermediates,
    )


def estimate_leakage(
    results: Sequence[ComponentResult],
    alpha: float = 0.05,
    bias_mode: str = BIAS_GENERAL,
) -> Tuple[EstimateReport, EstimateReport]:
    """
    (prior entropy report, mutual information report) for any result mix.

    Dispatches to the known-prior estimator when every statistical result is
    a known-prior one.
    """
    statistical = [r for r in results if r.is_statistical]
    known = bool(statistical) and all(
        r.kind is ComponentKind.SAMPLED_KNOWN_PRIOR for r in statistical
    )
    if known:
        mi = estimate_mi_known_prior(results, alpha, bias_mode)
    else:
        mi = estimate_mi(results, alpha, bias_mode)
    return estimate_entropy(results, alpha), mi
