#!/usr/bin/env python3
"""
Per-component analysis outcomes and their empirical sub-distributions.
"""

import math
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from distributions.joint import Cell, SubDistribution, ValueDomain
from exceptions import (
    EstimationError,
    InvalidDistributionError,
    ZeroImportanceMassError,
    ZeroSampleSizeError,
)

logger = logging.getLogger(__name__)

Probability = Union[Fraction, float]


class ComponentKind(str, Enum):
    """How a component was analyzed."""

    EXACT = "exact"
    SAMPLED = "sampled"
    ABSTRACT_SAMPLED = "abstract_sampled"
    SAMPLED_KNOWN_PRIOR = "sampled_known_prior"


@dataclass(frozen=True)
class ComponentResult:
    """
    Outcome of analyzing one component.

    Exact results carry rational cell masses. Sampled results carry joint
    counts K_ixy over n_i runs. Abstract-sampled results carry output counts
    K_i.y from one representative secret plus the conditional input prior pi_i.
    Known-prior results carry per-input weights theta_ix and per-input counts.
    """

    kind: ComponentKind
    component_id: int
    weight: Probability
    counts: Mapping[Cell, int] = field(default_factory=dict)
    output_counts: Mapping[int, int] = field(default_factory=dict)
    input_prior: Mapping[int, float] = field(default_factory=dict)
    input_weights: Mapping[int, Probability] = field(default_factory=dict)
    input_sizes: Mapping[int, int] = field(default_factory=dict)
    exact_mass: Mapping[Cell, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind is ComponentKind.ABSTRACT_SAMPLED and self.input_prior:
            total = math.fsum(self.input_prior.values())
            if abs(total - 1.0) > 1e-9:
                raise InvalidDistributionError(total, "input prior of an abstract component")
        if self.kind is ComponentKind.SAMPLED_KNOWN_PRIOR:
            rows: Counter = Counter()
            for (x, _), k in self.counts.items():
                rows[x] += k
            for x, size in self.input_sizes.items():
                if rows.get(x, 0) != size:
                    raise EstimationError(
                        f"Component {self.component_id}: counts for secret {x} sum to "
                        f"{rows.get(x, 0)}, expected {size}"
                    )
        if any(k < 0 for k in self.counts.values()) or any(
            k < 0 for k in self.output_counts.values()
        ):
            raise EstimationError(f"Component {self.component_id}: negative count")

    # Constructors

    @classmethod
    def exact(cls, component_id: int, mass: Mapping[Cell, Fraction]) -> "ComponentResult":
        return cls(
            kind=ComponentKind.EXACT,
            component_id=component_id,
            weight=sum(mass.values(), Fraction(0)),
            exact_mass=dict(mass),
        )

    @classmethod
    def sampled(
        cls, component_id: int, weight: Probability, counts: Mapping[Cell, int]
    ) -> "ComponentResult":
        return cls(
            kind=ComponentKind.SAMPLED,
            component_id=component_id,
            weight=weight,
            counts=dict(counts),
        )

    @classmethod
    def abstract_sampled(
        cls,
        component_id: int,
        weight: Probability,
        output_counts: Mapping[int, int],
        input_prior: Mapping[int, Probability],
    ) -> "ComponentResult":
        total = sum(input_prior.values())
        prior = {x: float(Fraction(p) / Fraction(total)) for x, p in input_prior.items() if p > 0}
        return cls(
            kind=ComponentKind.ABSTRACT_SAMPLED,
            component_id=component_id,
            weight=weight,
            output_counts=dict(output_counts),
            input_prior=prior,
        )

    @classmethod
    def known_prior(
        cls,
        component_id: int,
        input_weights: Mapping[int, Probability],
        counts: Mapping[Cell, int],
    ) -> "ComponentResult":
        """Per-input sizes are the row totals of ``counts``."""
        sizes: Counter = Counter()
        for (x, _), k in counts.items():
            sizes[x] += k
        weights = dict(input_weights)
        total = sum(weights.values())
        return cls(
            kind=ComponentKind.SAMPLED_KNOWN_PRIOR,
            component_id=component_id,
            weight=total,
            counts=dict(counts),
            input_weights=weights,
            input_sizes={x: sizes.get(x, 0) for x in set(weights) | set(sizes)},
        )

    # Accessors

    @property
    def is_statistical(self) -> bool:
        return self.kind is not ComponentKind.EXACT

    @property
    def sample_size(self) -> int:
        if self.kind is ComponentKind.ABSTRACT_SAMPLED:
            return sum(self.output_counts.values())
        if self.kind is ComponentKind.EXACT:
            return 0
        return sum(self.counts.values())

    def secrets(self) -> Iterable[int]:
        if self.kind is ComponentKind.EXACT:
            return {x for x, _ in self.exact_mass}
        if self.kind is ComponentKind.ABSTRACT_SAMPLED:
            return self.input_prior.keys()
        if self.kind is ComponentKind.SAMPLED_KNOWN_PRIOR:
            return set(self.input_weights) | {x for x, _ in self.counts}
        return {x for x, _ in self.counts}

    def merged_with(self, other: "ComponentResult") -> "ComponentResult":
        """
        Accumulate the counts of a later batch of the same component.

        Raises:
            EstimationError: If the results belong to different components or kinds
        """
        if other.kind is not self.kind or other.component_id != self.component_id:
            raise EstimationError(
                f"Cannot merge component {other.component_id} ({other.kind.value}) into "
                f"{self.component_id} ({self.kind.value})"
            )
        if self.kind is ComponentKind.EXACT:
            return self
        if self.kind is ComponentKind.ABSTRACT_SAMPLED:
            outputs = Counter(self.output_counts)
            outputs.update(other.output_counts)
            return ComponentResult(
                kind=self.kind,
                component_id=self.component_id,
                weight=self.weight,
                output_counts=dict(outputs),
                input_prior=self.input_prior,
            )
        counts = Counter(self.counts)
        counts.update(other.counts)
        if self.kind is ComponentKind.SAMPLED_KNOWN_PRIOR:
            return ComponentResult.known_prior(self.component_id, self.input_weights, counts)
        return ComponentResult.sampled(self.component_id, self.weight, counts)


def empirical_subdist(c: ComponentResult) -> SubDistribution:
    """
    Empirical sub-distribution R_i of a statistically analyzed component.

    Args:
        c: Sampled, abstract-sampled or known-prior result

    Returns:
        SubDistribution with float masses summing to the component weight

    Raises:
        EstimationError: If c is an exact result
        ZeroSampleSizeError: If c has no samples
        ZeroImportanceMassError: If a known-prior input with positive weight has no samples
    """
    if c.kind is ComponentKind.EXACT:
        raise EstimationError(f"Component {c.component_id} is exact; use exact_subdist")
    n = c.sample_size
    if n == 0:
        raise ZeroSampleSizeError(c.component_id)

    mass: Dict[Cell, float] = {}
    if c.kind is ComponentKind.SAMPLED:
        theta = float(c.weight)
        for cell, k in c.counts.items():
            if k:
                mass[cell] = theta * k / n
        weight = theta
    elif c.kind is ComponentKind.ABSTRACT_SAMPLED:
        theta = float(c.weight)
        for x, pi in c.input_prior.items():
            for y, k in c.output_counts.items():
                if k and pi > 0:
                    mass[(x, y)] = theta * pi * k / n
        weight = theta
    else:
        for x, theta_x in c.input_weights.items():
            if theta_x > 0 and c.input_sizes.get(x, 0) == 0:
                raise ZeroImportanceMassError(x, c.component_id)
        for (x, y), k in c.counts.items():
            theta_x = c.input_weights.get(x, 0)
            if k and theta_x > 0:
                mass[(x, y)] = float(theta_x) * k / c.input_sizes[x]
        weight = float(sum(v for v in c.input_weights.values() if v > 0))

    return SubDistribution(domain=ValueDomain.from_cells(mass.keys()), weight=weight, mass=mass)


def exact_subdist(c: ComponentResult) -> SubDistribution:
    """Exact sub-distribution Q_j of a precisely analyzed component."""
    if c.kind is not ComponentKind.EXACT:
        raise EstimationError(f"Component {c.component_id} is not exact")
    mass = {cell: Fraction(v) for cell, v in c.exact_mass.items() if v != 0}
    return SubDistribution(
        domain=ValueDomain.from_cells(mass.keys()), weight=Fraction(c.weight), mass=mass
    )


def to_subdist(c: ComponentResult) -> SubDistribution:
    """Sub-distribution of any component result."""
    return exact_subdist(c) if c.kind is ComponentKind.EXACT else empirical_subdist(c)


def merge_results(
    accumulated: Optional[Dict[int, ComponentResult]], batch: Iterable[ComponentResult]
) -> Dict[int, ComponentResult]:
    """Fold a batch of results into the per-component accumulator."""
    merged = dict(accumulated or {})
    for result in batch:
        previous = merged.get(result.component_id)
        merged[result.component_id] = result if previous is None else previous.merged_with(result)
    return merged


def split_weight(results: Iterable[ComponentResult]) -> Tuple[float, int]:
    """(sum of weights, total samples) over results."""
    results = list(results)
    if all(isinstance(r.weight, Fraction) for r in results):
        total = float(sum((r.weight for r in results), Fraction(0)))
    else:
        total = math.fsum(float(r.weight) for r in results)
    return total, sum(r.sample_size for r in results)
