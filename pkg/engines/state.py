#!/usr/bin/env python3
"""
Program states exchanged between the precise engine and the sampler.

A state holds concrete values for every non-secret variable and, instead of
one secret value, the group of initial secret valuations still consistent
with the path taken so far, each with its prior mass. Secrets are only
copied into the environment once the group is a single valuation and the
program assigns to one of them.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Hashable, Iterator, Mapping, Tuple

from decomposition.decomposer import Method
from engines.encoding import encode
from exceptions import TraceBudgetExceededError
from frontend.ast_nodes import IntLit, Interval, Program

Valuation = Tuple[int, ...]


class SecretSpace:
    """Secret variables of a program in declaration order."""

    def __init__(self, program: Program):
        self.names: Tuple[str, ...] = program.secrets
        self.index: Dict[str, int] = {name: i for i, name in enumerate(self.names)}

    def encode(self, valuation: Valuation) -> int:
        return encode(valuation)

    def prior(self, program: Program, cap: int) -> Dict[Valuation, Fraction]:
        """
        Joint prior over initial secret valuations (independent uniform intervals).

        Raises:
            TraceBudgetExceededError: If there are more valuations than ``cap``
        """
        axes = []
        size = 1
        for name in self.names:
            decl = program.declaration(name)
            init = decl.initializer if decl is not None else None
            if isinstance(init, Interval):
                values = range(init.lo.value, init.hi.value + 1)
            elif isinstance(init, IntLit):
                values = range(init.value, init.value + 1)
            else:
                values = range(0, 1)
            size *= len(values)
            axes.append((values, Fraction(1, len(values))))
        if size > cap:
            raise TraceBudgetExceededError(cap)
        prior: Dict[Valuation, Fraction] = {}
        for combo in itertools.product(*(values for values, _ in axes)):
            mass = Fraction(1)
            for _, p in axes:
                mass *= p
            prior[tuple(combo)] = mass
        return prior


@dataclass(frozen=True, eq=False)
class ProgramState:
    node: int
    env: Mapping[str, int]
    secrets: Mapping[Valuation, Fraction]
    path_probability: Fraction

    @property
    def weight(self) -> Fraction:
        """Probability of reaching this state: path probability times prior mass."""
        return self.path_probability * sum(self.secrets.values(), Fraction(0))

    def key(self) -> Hashable:
        """Identity used to merge states reached along different paths."""
        return self.node, tuple(sorted(self.env.items())), tuple(self.secrets)

    def conditional_prior(self, space: SecretSpace) -> Dict[int, Fraction]:
        """Prior restricted to this state's secrets, normalized, keyed by encoded secret."""
        total = sum(self.secrets.values(), Fraction(0))
        return {space.encode(v): mass / total for v, mass in self.secrets.items()}

    def valuations(self) -> Iterator[Valuation]:
        return iter(self.secrets)


@dataclass(frozen=True)
class TraceOutcome:
    """Terminated traces: encoded secret and observable with their exact probability."""

    secret: int
    observable: int
    probability: Fraction


@dataclass(frozen=True)
class SavedState:
    """State saved at a simulate statement, resumed by the sampler."""

    state: ProgramState
    method: Method
    line: int

    @property
    def weight(self) -> Fraction:
        return self.state.weight
