#!/usr/bin/env python3
"""
Seeded concrete simulation from saved program states.

Every component draws from its own Philox stream seeded with
(master seed, component id, batch index), so counts do not depend on
which worker ran which component or in what order. Simulate statements
met during a run are ignored.
"""

import logging
from collections import Counter
from typing import Dict, List, Mapping, Tuple

import numpy as np

from config import STEP_CAP
from decomposition.cfg import Cfg, NodeKind
from engines.encoding import encode
from engines.evaluator import bit_probability, evaluate, random_bounds, target_name
from engines.state import ProgramState, SecretSpace, Valuation
from exceptions import ProgramRuntimeError, RuntimeDivergenceError
from frontend.ast_nodes import RandomBit, RandomCall
from resource_managers import UNBOUNDED, Deadline

logger = logging.getLogger(__name__)

DEADLINE_CHECK_INTERVAL = 1000


def make_rng(seed: int, component_id: int, batch: int) -> np.random.Generator:
    """Counter-based generator for one component and batch."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, component_id, batch])))


class Sampler:
    """Runs a program concretely from saved states."""

    def __init__(self, cfg: Cfg, step_cap: int = STEP_CAP, deadline: Deadline = UNBOUNDED):
        self.cfg = cfg
        self.step_cap = step_cap
        self.deadline = deadline
        self.space = SecretSpace(cfg.program)
        self.observables = cfg.program.observables
        self._next: Dict[int, int] = {}
        self._targets: Dict[int, Tuple[int, int]] = {}
        for n in cfg.graph.nodes:
            kind = cfg.node(n).kind
            if kind is NodeKind.BRANCH:
                self._targets[n] = cfg.branch_targets(n)
            elif kind is not NodeKind.END:
                self._next[n] = cfg.next(n)

    def run_once(self, state: ProgramState, valuation: Valuation, rng: np.random.Generator) -> int:
        """
        Execute one run from ``state`` with the given initial secret valuation.

        Returns:
            Encoded observable value at termination

        Raises:
            RuntimeDivergenceError: If the run exceeds the step cap
            ProgramRuntimeError: On a run-time fault of the program
        """
        env = dict(state.env)
        for name, i in self.space.index.items():
            env.setdefault(name, valuation[i])

        def look(name: str) -> int:
            try:
                return env[name]
            except KeyError:
                raise ProgramRuntimeError(f"variable '{name}' has no value")

        node = state.node
        steps = 0
        while True:
            data = self.cfg.node(node)
            kind = data.kind
            if kind is NodeKind.END or kind is NodeKind.RETURN:
                return encode(tuple(env[o] for o in self.observables))
            steps += 1
            if steps > self.step_cap:
                raise RuntimeDivergenceError(self.step_cap)
            if kind is NodeKind.BRANCH:
                on_true, on_false = self._targets[node]
                node = on_true if evaluate(data.expr, look, data.line) else on_false
                continue
            if kind is NodeKind.ASSIGN:
                expr = data.expr
                if isinstance(expr, RandomCall):
                    lo, hi = random_bounds(expr, look, data.line)
                    value = int(rng.integers(lo, hi + 1))
                elif isinstance(expr, RandomBit):
                    value = int(rng.random() < bit_probability(expr, look, data.line))
                else:
                    value = evaluate(expr, look, data.line)
                env[target_name(data.target, look, data.line)] = value
            node = self._next[node]

    def _runs(self, state: ProgramState, valuations: List[Valuation], rng: np.random.Generator) -> Counter:
        counts: Counter = Counter()
        for i, valuation in enumerate(valuations):
            if i % DEADLINE_CHECK_INTERVAL == 0:
                self.deadline.check()
            counts[(self.space.encode(valuation), self.run_once(state, valuation, rng))] += 1
        return counts

    def sample(self, state: ProgramState, n: int, rng: np.random.Generator) -> Counter:
        """
        ``n`` runs, each drawing its secret from the state's conditional prior.

        Returns:
            Counter of (secret, observable) cells
        """
        keys = list(state.secrets)
        masses = np.array([float(m) for m in state.secrets.values()])
        drawn = rng.choice(len(keys), size=n, p=masses / masses.sum())
        return self._runs(state, [keys[i] for i in drawn], rng)

    def sample_abs(self, state: ProgramState, n: int, rng: np.random.Generator) -> Counter:
        """
        ``n`` runs from the representative secret (smallest encoded valuation).

        Returns:
            Counter of observables
        """
        representative = min(state.secrets, key=self.space.encode)
        counts: Counter = Counter()
        for (_, y), k in self._runs(state, [representative] * n, rng).items():
            counts[y] += k
        return counts

    def sample_known_prior(
        self, state: ProgramState, sizes: Mapping[int, int], rng: np.random.Generator
    ) -> Counter:
        """
        ``sizes[x]`` runs for every encoded secret ``x``.

        Returns:
            Counter of (secret, observable) cells
        """
        by_code = {self.space.encode(v): v for v in state.secrets}
        valuations: List[Valuation] = []
        for x in sorted(sizes):
            if x not in by_code:
                raise ProgramRuntimeError(f"secret {x} is not reachable in this component")
            valuations.extend([by_code[x]] * sizes[x])
        return self._runs(state, valuations, rng)
