#!/usr/bin/env python3
"""
Exact enumeration of execution traces with rational probabilities.

States are explored in reverse post-order of the CFG. States reaching the
same node with the same environment and secret group are merged by adding
their path probabilities, so a loop-free program is enumerated in time
proportional to its distinct states rather than its paths. A state splits
on every probabilistic assignment and, lazily, on every expression whose
value depends on which secret valuation the run started from.

Terminated paths become trace outcomes; paths reaching a ``simulate`` or
``simulate-abs`` statement are saved for the sampler and stop there.
"""

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from config import TRACE_CAP
from decomposition.cfg import Cfg, NodeKind
from decomposition.decomposer import Method
from distributions.joint import Cell
from engines.encoding import encode
from engines.evaluator import (
    Lookup,
    bit_probability,
    evaluate,
    random_bounds,
    target_name,
)
from engines.state import ProgramState, SavedState, SecretSpace, TraceOutcome, Valuation
from exceptions import ProgramRuntimeError, TraceBudgetExceededError
from frontend.ast_nodes import (
    DecimalLit,
    Expr,
    Index,
    IntLit,
    LValue,
    RandomBit,
    RandomCall,
    free_vars,
)
from resource_managers import UNBOUNDED, Deadline

logger = logging.getLogger(__name__)

DEADLINE_CHECK_INTERVAL = 4096


@dataclass
class EnumerationResult:
    """Exact outcomes of terminated paths plus the states saved at simulate statements."""

    outcomes: Dict[Cell, Fraction] = field(default_factory=dict)
    saved: List[SavedState] = field(default_factory=list)
    expanded: int = 0

    @property
    def exact_weight(self) -> Fraction:
        return sum(self.outcomes.values(), Fraction(0))

    @property
    def trace_outcomes(self) -> List[TraceOutcome]:
        return [TraceOutcome(x, y, p) for (x, y), p in sorted(self.outcomes.items())]

    @property
    def total_weight(self) -> Fraction:
        return self.exact_weight + sum((s.weight for s in self.saved), Fraction(0))


class PreciseEngine:
    """Depth-first-equivalent trace enumeration over a CFG."""

    def __init__(self, cfg: Cfg, trace_cap: int = TRACE_CAP, deadline: Deadline = UNBOUNDED):
        self.cfg = cfg
        self.program = cfg.program
        self.trace_cap = trace_cap
        self.deadline = deadline
        self.space = SecretSpace(self.program)
        self.observables = self.program.observables
        postorder = list(nx.dfs_postorder_nodes(cfg.graph, cfg.entry))
        self.order = {n: i for i, n in enumerate(reversed(postorder))}

        self._pending: Dict[int, Dict[object, ProgramState]] = {}
        self._queue: List[Tuple[int, int]] = []
        self._result = EnumerationResult()

    def initial_state(self) -> ProgramState:
        env = {}
        for decl in self.program.declarations:
            if decl.var_class == "secret":
                continue
            env[decl.name] = decl.initializer.value if isinstance(decl.initializer, IntLit) else 0
        return ProgramState(
            node=self.cfg.entry,
            env=env,
            secrets=self.space.prior(self.program, self.trace_cap),
            path_probability=Fraction(1),
        )

    # Worklist

    def push(self, state: ProgramState) -> None:
        at_node = self._pending.get(state.node)
        if at_node is None:
            at_node = self._pending[state.node] = {}
            heapq.heappush(self._queue, (self.order.get(state.node, len(self.order)), state.node))
        key = state.key()
        previous = at_node.get(key)
        if previous is None:
            at_node[key] = state
        else:
            at_node[key] = replace(
                previous, path_probability=previous.path_probability + state.path_probability
            )

    def run(self, initial: Optional[ProgramState] = None) -> EnumerationResult:
        """
        Enumerate all paths from ``initial`` (the program start by default).

        Raises:
            TraceBudgetExceededError: If more states than the trace cap are expanded
            ProgramRuntimeError: On a run-time fault of the program
            TimeoutExceededError: If the deadline passes
        """
        self._pending.clear()
        self._queue.clear()
        self._result = EnumerationResult()
        self.push(initial if initial is not None else self.initial_state())
        while self._queue:
            _, node = heapq.heappop(self._queue)
            for state in self._pending.pop(node).values():
                self._result.expanded += 1
                if self._result.expanded > self.trace_cap:
                    raise TraceBudgetExceededError(self.trace_cap)
                if self._result.expanded % DEADLINE_CHECK_INTERVAL == 0:
                    self.deadline.check()
                self.step(state)
        logger.debug(
            f"Enumerated {self._result.expanded} states: {len(self._result.outcomes)} outcome cells, "
            f"{len(self._result.saved)} saved states"
        )
        return self._result

    # Transitions

    def step(self, state: ProgramState) -> None:
        data = self.cfg.node(state.node)
        if data.kind in (NodeKind.END, NodeKind.RETURN):
            self.terminate(state)
        elif data.is_simulate:
            method = Method.SAMPLE if data.kind is NodeKind.SIMULATE else Method.SAMPLE_ABS
            resumed = replace(state, node=self.cfg.next(state.node))
            self._result.saved.append(SavedState(resumed, method, data.line))
        elif data.kind is NodeKind.NOP:
            self.push(replace(state, node=self.cfg.next(state.node)))
        elif data.kind is NodeKind.BRANCH:
            on_true, on_false = self.cfg.branch_targets(state.node)
            for sub in self.split(state, [data.expr], data.line):
                taken = evaluate(data.expr, self.lookup(sub), data.line)
                self.push(replace(sub, node=on_true if taken else on_false))
        else:
            self.assign(state)

    def assign(self, state: ProgramState) -> None:
        data = self.cfg.node(state.node)
        target, expr, line = data.target, data.expr, data.line
        succ = self.cfg.next(state.node)
        for sub in self.split(state, _dependencies(target, expr), line):
            look = self.lookup(sub)
            name = target_name(target, look, line)
            branches: Sequence[Tuple[int, Fraction]]
            if isinstance(expr, RandomCall):
                lo, hi = random_bounds(expr, look, line)
                p = Fraction(1, hi - lo + 1)
                branches = [(v, p) for v in range(lo, hi + 1)]
            elif isinstance(expr, RandomBit):
                p = bit_probability(expr, look, line)
                branches = [(v, q) for v, q in ((0, 1 - p), (1, p)) if q > 0]
            else:
                branches = [(evaluate(expr, look, line), Fraction(1))]
            targets = self.singletons(sub) if name in self.space.index else iter([sub])
            for t in targets:
                for value, p in branches:
                    env = dict(t.env)
                    env[name] = value
                    self.push(ProgramState(succ, env, t.secrets, t.path_probability * p))

    def terminate(self, state: ProgramState) -> None:
        y = encode(tuple(state.env[o] for o in self.observables))
        outcomes = self._result.outcomes
        for valuation, mass in state.secrets.items():
            cell = (self.space.encode(valuation), y)
            outcomes[cell] = outcomes.get(cell, Fraction(0)) + state.path_probability * mass

    # Secret handling

    def lookup(self, state: ProgramState, valuation: Optional[Valuation] = None) -> Lookup:
        """Variable lookup for ``state``, resolving unassigned secrets from ``valuation``."""
        if valuation is None:
            valuation = next(iter(state.secrets), ())
        env, index = state.env, self.space.index

        def read(name: str) -> int:
            if name in env:
                return env[name]
            if name in index and valuation:
                return valuation[index[name]]
            raise ProgramRuntimeError(f"variable '{name}' has no value")

        return read

    def split(self, state: ProgramState, exprs: Sequence[Expr], line: int) -> List[ProgramState]:
        """Partition the secret group by the values ``exprs`` take under each valuation."""
        reads = set()
        for e in exprs:
            reads |= free_vars(e)
        if len(state.secrets) <= 1 or not any(
            name in self.space.index and name not in state.env for name in reads
        ):
            return [state]
        groups: Dict[Tuple[int, ...], Dict[Valuation, Fraction]] = defaultdict(dict)
        for valuation, mass in state.secrets.items():
            look = self.lookup(state, valuation)
            groups[tuple(evaluate(e, look, line) for e in exprs)][valuation] = mass
        return [replace(state, secrets=g) for g in groups.values()]

    def singletons(self, state: ProgramState) -> Iterator[ProgramState]:
        """One state per secret valuation, with the secrets copied into the environment."""
        for valuation, mass in state.secrets.items():
            env = dict(state.env)
            for name, i in self.space.index.items():
                env.setdefault(name, valuation[i])
            yield ProgramState(state.node, env, {valuation: mass}, state.path_probability)


def _dependencies(target: LValue, expr: Expr) -> List[Expr]:
    deps: List[Expr] = [target.index] if isinstance(target, Index) else []
    if isinstance(expr, RandomCall):
        deps += [expr.lo, expr.hi]
    elif isinstance(expr, RandomBit):
        if not isinstance(expr.p, DecimalLit):
            deps.append(expr.p)
    else:
        deps.append(expr)
    return deps


def enumerate_traces(
    cfg: Cfg,
    trace_cap: int = TRACE_CAP,
    deadline: Deadline = UNBOUNDED,
    initial: Optional[ProgramState] = None,
) -> EnumerationResult:
    """
    Enumerate every trace of an annotated program exactly.

    Args:
        cfg: CFG of the preprocessed (and possibly decomposed) program
        trace_cap: Maximum number of states to expand
        deadline: Wall-clock budget
        initial: Start state (program start when omitted)

    Returns:
        EnumerationResult with exact outcomes and saved states
    """
    return PreciseEngine(cfg, trace_cap, deadline).run(initial)
