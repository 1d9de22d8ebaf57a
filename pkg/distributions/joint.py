#!/usr/bin/env python3
"""
Joint and sub-probability distributions over secret x observable values.

Precise analysis produces exact rational masses; statistical analysis produces
floating-point empirical masses. Both meet in compose_joint, which converts to
floating point once, cell by cell, with an exactly rounded sum so that the
fused matrix does not depend on the order of the parts.
"""

import math
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from exceptions import (
    EmptySupportError,
    InvalidDistributionError,
    NegativeMassError,
    WeightSumMismatchError,
)

logger = logging.getLogger(__name__)

Probability = Union[Fraction, float]
Cell = Tuple[int, int]

# Tolerances
EMPIRICAL_TOLERANCE = 1e-12
WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ValueDomain:
    """Ordered secret values (rows) and observable values (columns)."""

    secrets: Tuple[int, ...]
    observables: Tuple[int, ...]

    def __post_init__(self) -> None:
        for label, values in (("secrets", self.secrets), ("observables", self.observables)):
            if not values:
                raise InvalidDistributionError(0.0, f"value domain has no {label}")
            if any(a >= b for a, b in zip(values, values[1:])):
                raise InvalidDistributionError(
                    0.0, f"{label} must be strictly ascending and duplicate-free"
                )

    @classmethod
    def from_values(cls, secrets: Iterable[int], observables: Iterable[int]) -> "ValueDomain":
        """Build a domain from unordered, possibly repeated values."""
        return cls(tuple(sorted(set(secrets))), tuple(sorted(set(observables))))

    @classmethod
    def from_cells(cls, cells: Iterable[Cell]) -> "ValueDomain":
        xs, ys = set(), set()
        for x, y in cells:
            xs.add(x)
            ys.add(y)
        return cls.from_values(xs, ys)

    def union(self, other: "ValueDomain") -> "ValueDomain":
        """Smallest domain containing both domains."""
        return ValueDomain.from_values(
            set(self.secrets) | set(other.secrets),
            set(self.observables) | set(other.observables),
        )

    @cached_property
    def secret_index(self) -> Dict[int, int]:
        return {x: i for i, x in enumerate(self.secrets)}

    @cached_property
    def observable_index(self) -> Dict[int, int]:
        return {y: j for j, y in enumerate(self.observables)}

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.secrets), len(self.observables)


@dataclass(frozen=True)
class SubDistribution:
    """
    One component's contribution to the joint distribution.

    The total mass equals the component's execution probability (weight).
    Exact instances hold Fraction masses and are checked exactly; empirical
    instances hold floats and are checked to EMPIRICAL_TOLERANCE.
    """

    domain: ValueDomain
    weight: Probability
    mass: Mapping[Cell, Probability] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for cell, value in self.mass.items():
            if value < 0:
                raise NegativeMassError(cell, float(value))
            x, y = cell
            if x not in self.domain.secret_index or y not in self.domain.observable_index:
                raise InvalidDistributionError(float(self.weight), f"cell {cell!r} outside domain")
        if self.weight < 0 or self.weight > 1:
            raise InvalidDistributionError(float(self.weight), "weight must lie in [0, 1]")

        total: Probability
        if self.is_exact:
            total = sum(self.mass.values(), Fraction(0))
            if total != self.weight:
                raise InvalidDistributionError(
                    float(total), f"exact mass does not equal weight {self.weight}"
                )
        else:
            total = math.fsum(float(v) for v in self.mass.values())
            if abs(total - float(self.weight)) > EMPIRICAL_TOLERANCE:
                raise InvalidDistributionError(
                    total, f"empirical mass does not equal weight {float(self.weight)!r}"
                )

    @property
    def is_exact(self) -> bool:
        return isinstance(self.weight, Fraction) and all(
            isinstance(v, Fraction) for v in self.mass.values()
        )

    @classmethod
    def from_mass(
        cls,
        mass: Mapping[Cell, Probability],
        weight: Optional[Probability] = None,
        domain: Optional[ValueDomain] = None,
    ) -> "SubDistribution":
        """
        Build a sub-distribution, deriving the domain and weight when omitted.

        Args:
            mass: Cell masses
            weight: Declared total; defaults to the (exact or fsum) total of mass
            domain: Value domain; defaults to the values present in mass
        """
        if domain is None:
            domain = ValueDomain.from_cells(mass.keys())
        if weight is None:
            values = list(mass.values())
            if all(isinstance(v, Fraction) for v in values):
                weight = sum(values, Fraction(0))
            else:
                weight = math.fsum(float(v) for v in values)
        return cls(domain=domain, weight=weight, mass=dict(mass))

    def to_matrix(self, domain: Optional[ValueDomain] = None) -> np.ndarray:
        """Dense float matrix of this part over ``domain`` (zero-padded)."""
        domain = domain or self.domain
        matrix = np.zeros(domain.shape)
        rows, cols = domain.secret_index, domain.observable_index
        for (x, y), value in self.mass.items():
            matrix[rows[x], cols[y]] = float(value)
        return matrix


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """
    Full probability matrix over secrets x observables with marginals.

    ``exact_mass`` is kept when every fused part was exact, so precise
    results can be compared bit-for-bit under rational arithmetic.
    """

    domain: ValueDomain
    pxy: np.ndarray
    exact_mass: Optional[Dict[Cell, Fraction]] = None

    def __post_init__(self) -> None:
        pxy = np.array(self.pxy, dtype=float)
        if pxy.shape != self.domain.shape:
            raise InvalidDistributionError(
                float(pxy.sum()), f"matrix shape {pxy.shape} does not match domain {self.domain.shape}"
            )
        if np.any(pxy < 0):
            i, j = np.argwhere(pxy < 0)[0]
            raise NegativeMassError(
                (self.domain.secrets[i], self.domain.observables[j]), float(pxy[i, j])
            )
        total = math.fsum(pxy.ravel())
        if self.exact_mass is not None:
            exact_total = sum(self.exact_mass.values(), Fraction(0))
            if exact_total != 1:
                raise InvalidDistributionError(float(exact_total), "exact joint must sum to 1")
        elif abs(total - 1.0) > EMPIRICAL_TOLERANCE * max(1, pxy.size):
            raise InvalidDistributionError(total, "joint distribution must sum to 1")
        if not np.any(pxy > 0):
            raise EmptySupportError()
        pxy.setflags(write=False)
        px = pxy.sum(axis=1)
        py = pxy.sum(axis=0)
        px.setflags(write=False)
        py.setflags(write=False)
        object.__setattr__(self, "pxy", pxy)
        object.__setattr__(self, "px", px)
        object.__setattr__(self, "py", py)

    # Populated in __post_init__
    px: np.ndarray = field(init=False, repr=False, compare=False)
    py: np.ndarray = field(init=False, repr=False, compare=False)

    @classmethod
    def from_matrix(
        cls,
        matrix: Union[np.ndarray, Sequence[Sequence[float]]],
        secrets: Optional[Sequence[int]] = None,
        observables: Optional[Sequence[int]] = None,
    ) -> "JointDistribution":
        """Wrap a dense joint matrix; values default to 0..n-1."""
        pxy = np.asarray(matrix, dtype=float)
        rows, cols = pxy.shape
        domain = ValueDomain(
            tuple(secrets) if secrets is not None else tuple(range(rows)),
            tuple(observables) if observables is not None else tuple(range(cols)),
        )
        return cls(domain=domain, pxy=pxy)

    @classmethod
    def from_channel(
        cls,
        channel: Union[np.ndarray, Sequence[Sequence[float]]],
        prior: Optional[Sequence[float]] = None,
        normalize_rows: bool = False,
    ) -> "JointDistribution":
        """
        Joint distribution of a channel matrix under a prior.

        Args:
            channel: Row-stochastic matrix (secret rows, observable columns)
            prior: Secret prior; uniform when omitted
            normalize_rows: Rescale each row to sum to 1 (printed matrices are rounded)
        """
        c = np.asarray(channel, dtype=float)
        if normalize_rows:
            c = c / c.sum(axis=1, keepdims=True)
        p = np.full(c.shape[0], 1.0 / c.shape[0]) if prior is None else np.asarray(prior, float)
        return cls.from_matrix(c * p[:, None])

    @classmethod
    def from_exact(cls, mass: Mapping[Cell, Fraction]) -> "JointDistribution":
        """Rational-backed joint built from exact cell masses summing to 1."""
        positive = {cell: Fraction(v) for cell, v in mass.items() if v != 0}
        if not positive:
            raise EmptySupportError()
        domain = ValueDomain.from_cells(positive.keys())
        matrix = np.zeros(domain.shape)
        for (x, y), value in positive.items():
            matrix[domain.secret_index[x], domain.observable_index[y]] = float(value)
        return cls(domain=domain, pxy=matrix, exact_mass=positive)

    @property
    def is_exact(self) -> bool:
        return self.exact_mass is not None

    @cached_property
    def support(self) -> FrozenSet[Cell]:
        """Cells (x, y) with strictly positive probability."""
        xs, ys = self.domain.secrets, self.domain.observables
        return frozenset((xs[i], ys[j]) for i, j in np.argwhere(self.pxy > 0))

    @cached_property
    def support_x(self) -> FrozenSet[int]:
        return frozenset(x for x, p in zip(self.domain.secrets, self.px) if p > 0)

    @cached_property
    def support_y(self) -> FrozenSet[int]:
        return frozenset(y for y, p in zip(self.domain.observables, self.py) if p > 0)

    @cached_property
    def row_support(self) -> Dict[int, FrozenSet[int]]:
        """Observables reachable from each secret (D_x)."""
        rows: Dict[int, set] = defaultdict(set)
        for x, y in self.support:
            rows[x].add(y)
        return {x: frozenset(ys) for x, ys in rows.items()}

    @cached_property
    def col_support(self) -> Dict[int, FrozenSet[int]]:
        """Secrets that can produce each observable (D_y)."""
        cols: Dict[int, set] = defaultdict(set)
        for x, y in self.support:
            cols[y].add(x)
        return {y: frozenset(xs) for y, xs in cols.items()}

    def probability(self, x: int, y: int) -> float:
        i = self.domain.secret_index.get(x)
        j = self.domain.observable_index.get(y)
        if i is None or j is None:
            return 0.0
        return float(self.pxy[i, j])


def compose_joint(
    parts: Sequence[SubDistribution],
    tolerance: float = WEIGHT_TOLERANCE,
) -> JointDistribution:
    """
    Sum component sub-distributions into the joint distribution.

    Domains are unioned and missing cells padded with zero. Each cell is the
    exactly rounded sum of its contributions, so any permutation of ``parts``
    yields an identical matrix.

    Args:
        parts: Sub-distributions of mutually disjoint components
        tolerance: Allowed deviation of the weight sum from 1

    Returns:
        JointDistribution: The fused joint (rational-backed if all parts are exact)

    Raises:
        WeightSumMismatchError: If the weights do not sum to 1
        NegativeMassError: On any negative cell
    """
    if not parts:
        raise WeightSumMismatchError(0.0, tolerance)

    if all(isinstance(p.weight, Fraction) for p in parts):
        weight_sum: float = float(sum((p.weight for p in parts), Fraction(0)))
    else:
        weight_sum = math.fsum(float(p.weight) for p in parts)
    if abs(weight_sum - 1.0) > tolerance:
        raise WeightSumMismatchError(weight_sum, tolerance)

    domain = parts[0].domain
    for part in parts[1:]:
        domain = domain.union(part.domain)

    exact_cells: Dict[Cell, Fraction] = defaultdict(Fraction)
    float_cells: Dict[Cell, List[float]] = defaultdict(list)
    for part in parts:
        for cell, value in part.mass.items():
            if value < 0:
                raise NegativeMassError(cell, float(value))
            if isinstance(value, Fraction):
                exact_cells[cell] += value
            else:
                float_cells[cell].append(float(value))

    matrix = np.zeros(domain.shape)
    rows, cols = domain.secret_index, domain.observable_index
    for cell in set(exact_cells) | set(float_cells):
        contributions = list(float_cells.get(cell, ()))
        if cell in exact_cells:
            contributions.append(float(exact_cells[cell]))
        matrix[rows[cell[0]], cols[cell[1]]] = math.fsum(contributions)

    all_exact = all(p.is_exact for p in parts)
    exact_mass = {c: v for c, v in exact_cells.items() if v != 0} if all_exact else None
    if exact_mass is not None and sum(exact_mass.values(), Fraction(0)) != 1:
        # Exact parts whose weights sum to 1 only within tolerance
        exact_mass = None

    if exact_mass is None:
        # Absorb rounding so the float joint sums to 1 within EMPIRICAL_TOLERANCE
        total = math.fsum(matrix.ravel())
        if total > 0:
            matrix = matrix / total

    logger.debug(f"Composed {len(parts)} parts into a {domain.shape[0]}x{domain.shape[1]} joint")
    return JointDistribution(domain=domain, pxy=matrix, exact_mass=exact_mass)
