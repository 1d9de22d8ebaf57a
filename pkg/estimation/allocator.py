#!/usr/bin/env python3
"""
Sample budget allocation across statistically analyzed components.

A pilot batch is split uniformly. Every later batch is split in proportion to
the square roots of the per-component intermediate variances measured on
the results accumulated so far, which minimizes the summed variance
sum_i v_i / n_i for a fixed budget.
"""

import math
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from distributions.joint import JointDistribution
from estimation.components import ComponentKind, ComponentResult
from estimation.kernels import (
    FusedArrays,
    abstract_terms,
    component_matrix,
    entropy_terms,
    input_prior_vector,
    known_prior_terms,
    output_vector,
    sampled_terms,
)
from exceptions import AllocationError, BudgetTooSmallError, EmptyPilotError

logger = logging.getLogger(__name__)


class AllocationMode(str, Enum):
    """Which variance the allocation minimizes."""

    MI = "mi"
    ENTROPY = "entropy"
    KNOWN_PRIOR = "known_prior"
    ATS = "ats"


@dataclass
class AllocationWeights:
    """
    Intermediate variances driving one allocation.

    ``per_component`` maps component id to v_i. In known-prior mode the
    weights live in ``per_input`` keyed by (component id, secret) instead.
    """

    mode: AllocationMode
    per_component: Dict[int, float] = field(default_factory=dict)
    per_input: Dict[tuple, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, value in list(self.per_component.items()) + list(self.per_input.items()):
            if not math.isfinite(value) or value < 0:
                raise AllocationError(f"Allocation weight for {key} is invalid: {value}")

    @property
    def keyed(self) -> Dict[Hashable, float]:
        if self.mode is AllocationMode.KNOWN_PRIOR:
            return dict(self.per_input)
        return dict(self.per_component)


@dataclass
class AllocationPlan:
    """Integer sample sizes of one batch; they sum to ``total``."""

    total: int
    per_component: Dict[int, int] = field(default_factory=dict)
    per_input: Dict[tuple, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "total": self.total,
            "per_component": {str(k): v for k, v in sorted(self.per_component.items())},
            "per_input": {f"{i}:{x}": v for (i, x), v in sorted(self.per_input.items())},
        }


def compute_weights(
    pilot: Sequence[ComponentResult],
    fused: JointDistribution,
    mode: AllocationMode = AllocationMode.MI,
) -> AllocationWeights:
    """
    Intermediate variances of the statistical components in ``pilot``.

    Args:
        pilot: Accumulated results (exact results are ignored)
        fused: Joint fused from the same results
        mode: Which estimator's variance to minimize

    Returns:
        AllocationWeights for ``mode``

    Raises:
        EmptyPilotError: If ``pilot`` holds no statistical result
    """
    statistical = sorted(
        (r for r in pilot if r.is_statistical), key=lambda r: r.component_id
    )
    if not statistical:
        raise EmptyPilotError()

    f = FusedArrays.from_joint(fused)
    weights = AllocationWeights(mode=mode)
    for c in statistical:
        if c.sample_size == 0:
            weights.per_component[c.component_id] = 0.0
            continue
        theta = float(c.weight)
        n = c.sample_size

        if mode is AllocationMode.KNOWN_PRIOR:
            terms = known_prior_terms(c, fused, f)
            thetas = terms.kernels["theta_x"]
            spreads = terms.kernels["spread_x"]
            for x, row in fused.domain.secret_index.items():
                if x in c.input_weights:
                    weights.per_input[(c.component_id, x)] = float(
                        thetas[row] ** 2 * spreads[row]
                    )
            continue

        if mode is AllocationMode.ENTROPY:
            if c.kind is ComponentKind.SAMPLED:
                dx = component_matrix(c, fused).sum(axis=1)
                spread = entropy_terms(dx, theta, n, f).spread
            else:
                spread = 0.0
        elif c.kind is ComponentKind.ABSTRACT_SAMPLED:
            spread = abstract_terms(
                input_prior_vector(c, fused), output_vector(c, fused), theta, n, f
            ).spread
        else:
            spread = sampled_terms(component_matrix(c, fused), theta, n, f).spread
        weights.per_component[c.component_id] = theta * theta * spread

    logger.debug(f"Allocation weights ({mode.value}): {weights.keyed}")
    return weights


def ideal_allocation(weights: Mapping[Hashable, float], n: int) -> Dict[Hashable, float]:
    """
    Real-valued optimum n_i = n * sqrt(v_i) / sum_j sqrt(v_j), before floors and rounding.

    All-zero weights split the budget uniformly.
    """
    keys = sorted(weights)
    if not keys:
        return {}
    roots = np.sqrt(np.array([weights[k] for k in keys], dtype=float))
    total = roots.sum()
    if total == 0:
        return {k: n / len(keys) for k in keys}
    return {k: float(n * r / total) for k, r in zip(keys, roots)}


def _floored(weights: Mapping[Hashable, float], n: int, floor: int) -> Dict[Hashable, float]:
    """Proportional split where entries that would fall below ``floor`` are pinned to it."""
    pinned: Dict[Hashable, float] = {}
    free = dict(weights)
    while free:
        budget = n - floor * len(pinned)
        share = ideal_allocation(free, budget)
        low = [k for k, v in share.items() if v < floor]
        if not low:
            return {**pinned, **share}
        for k in low:
            pinned[k] = float(floor)
            del free[k]
    return pinned


def _largest_remainder(real: Mapping[Hashable, float], n: int) -> Dict[Hashable, int]:
    keys = sorted(real)
    base = {k: int(math.floor(real[k])) for k in keys}
    leftover = n - sum(base.values())
    order = sorted(range(len(keys)), key=lambda j: (-(real[keys[j]] - base[keys[j]]), j))
    for j in order[:max(0, leftover)]:
        k = keys[j]
        base[k] += 1
    return base


def allocate(weights: Mapping[Hashable, float], n: int, floor: int = 1) -> Dict[Hashable, int]:
    """
    Integer allocation of ``n`` samples proportional to sqrt(weight) with a floor.

    Raises:
        BudgetTooSmallError: If ``n`` cannot give every key its floor
    """
    if not weights:
        return {}
    if n < floor * len(weights):
        raise BudgetTooSmallError(n, len(weights), floor)
    return _largest_remainder(_floored(weights, n, floor), n)


def optimal_allocation(w: AllocationWeights, n: int, floor: int = 1) -> AllocationPlan:
    """
    Variance-minimizing integer allocation of a batch of ``n`` samples.

    Args:
        w: Intermediate variances from compute_weights
        n: Batch budget
        floor: Minimum samples per component (per input in known-prior mode)

    Returns:
        AllocationPlan whose entries sum to ``n``

    Raises:
        BudgetTooSmallError: If n < (#components) * floor
    """
    sizes = allocate(w.keyed, n, floor)
    plan = AllocationPlan(total=n)
    if w.mode is AllocationMode.KNOWN_PRIOR:
        plan.per_input = dict(sizes)  # type: ignore[arg-type]
        for (i, _), k in plan.per_input.items():
            plan.per_component[i] = plan.per_component.get(i, 0) + k
    else:
        plan.per_component = dict(sizes)  # type: ignore[arg-type]
    return plan


def uniform_plan(
    components: Iterable[int],
    n: int,
    floor: int = 1,
    inputs: Optional[Mapping[int, Iterable[int]]] = None,
) -> AllocationPlan:
    """
    Pilot allocation: ``n`` split evenly over components, or over (component, secret) pairs.
    """
    if inputs is not None:
        keys = {(i, x): 0.0 for i in components for x in inputs[i]}
        return optimal_allocation(
            AllocationWeights(mode=AllocationMode.KNOWN_PRIOR, per_input=keys), n, floor
        )
    return optimal_allocation(
        AllocationWeights(mode=AllocationMode.MI, per_component={i: 0.0 for i in components}),
        n,
        floor,
    )


def batch_schedule(total: int, fraction: float) -> List[int]:
    """
    Batch budgets for iterative re-allocation.

    ``ceil(1 / fraction)`` equal batches; the remainder goes to the last one.

    Raises:
        ValueError: If fraction is outside (0, 1] or total < 1
    """
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must lie in (0, 1] (got {fraction})")
    if total < 1:
        raise ValueError(f"total must be positive (got {total})")
    count = max(1, min(math.ceil(1.0 / fraction - 1e-9), total))
    base = total // count
    return [base] * (count - 1) + [total - base * (count - 1)]


def allocation_objective(weights: Mapping[Hashable, float], sizes: Mapping[Hashable, float]) -> float:
    """sum_i v_i / n_i, the quantity the allocation minimizes."""
    return math.fsum(weights[k] / sizes[k] for k in weights if weights[k] > 0)
