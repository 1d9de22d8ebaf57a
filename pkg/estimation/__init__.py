#!/usr/bin/env python3
"""
Estimation module for the leakage analyzer.
Fuses component results, corrects the estimator bias and plans sample budgets.
"""

from .allocator import (
    AllocationMode,
    AllocationPlan,
    AllocationWeights,
    batch_schedule,
    compute_weights,
    ideal_allocation,
    optimal_allocation,
    uniform_plan,
)
from .components import ComponentKind, ComponentResult, empirical_subdist, merge_results
from .estimator import (
    corollary_bias,
    estimate_cond_entropy_known_prior,
    estimate_entropy,
    estimate_leakage,
    estimate_mi,
    estimate_mi_known_prior,
    fuse,
)
from .report import BIAS_COROLLARY, BIAS_GENERAL, EstimateReport, confidence_interval

__all__ = [
    'AllocationMode',
    'AllocationPlan',
    'AllocationWeights',
    'batch_schedule',
    'compute_weights',
    'ideal_allocation',
    'optimal_allocation',
    'uniform_plan',
    'ComponentKind',
    'ComponentResult',
    'empirical_subdist',
    'merge_results',
    'corollary_bias',
    'estimate_cond_entropy_known_prior',
    'estimate_entropy',
    'estimate_leakage',
    'estimate_mi',
    'estimate_mi_known_prior',
    'fuse',
    'BIAS_COROLLARY',
    'BIAS_GENERAL',
    'EstimateReport',
    'confidence_interval',
]
