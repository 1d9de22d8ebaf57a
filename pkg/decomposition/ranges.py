#!/usr/bin/env python3
"""
Value-range estimation by forward abstract interpretation over intervals.

Each variable is tracked as a closed integer interval clamped to the range
of its width tag; its value count is the interval size. Joins take interval
hulls. Loop heads widen to the width range after a few unstable visits.
The annotation of a node is the abstract state on entry to it.
"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple

import networkx as nx

from decomposition.cfg import Cfg, NodeKind
from frontend.ast_nodes import (
    Binary,
    DecimalLit,
    Expr,
    Index,
    IntLit,
    Interval,
    Program,
    RandomBit,
    RandomCall,
    Unary,
    Var,
    element_name,
)
from frontend.semantics import apply_binary, truncating_div, width_range

logger = logging.getLogger(__name__)

Range = Tuple[int, int]
AbstractState = Dict[str, Range]

WIDEN_AFTER = 3


@dataclass(frozen=True)
class NodeRanges:
    """Abstract state on entry to one CFG node."""

    intervals: Mapping[str, Range]
    counts: Mapping[str, int]
    tot_obs: int
    tot_int: int
    tot_sec: int

    def describe(self) -> str:
        return f"TOT_OBS = {self.tot_obs}; TOT_INT = {self.tot_int}"


@dataclass
class RangeAnnotation:
    """Per-node range estimates of a CFG."""

    per_node: Dict[int, NodeRanges] = field(default_factory=dict)

    def __getitem__(self, node: int) -> NodeRanges:
        return self.per_node[node]

    def __contains__(self, node: object) -> bool:
        return node in self.per_node

    def dot_annotations(self) -> Dict[int, str]:
        return {n: r.describe() for n, r in self.per_node.items()}


def _hull(a: Range, b: Range) -> Range:
    return min(a[0], b[0]), max(a[1], b[1])


def _clamp(r: Range, bounds: Range) -> Range:
    lo, hi = max(r[0], bounds[0]), min(r[1], bounds[1])
    if lo > hi:
        return bounds
    return lo, hi


def _count(r: Range) -> int:
    return r[1] - r[0] + 1


class RangeEstimator:
    """Interval interpretation of one CFG."""

    def __init__(self, cfg: Cfg):
        self.cfg = cfg
        self.program: Program = cfg.program
        self.widths: Dict[str, Range] = {
            d.name: width_range(d.width) for d in self.program.declarations
        }

    # Abstract expression evaluation

    def eval(self, e: Expr, state: AbstractState) -> Range:
        if isinstance(e, IntLit):
            return e.value, e.value
        if isinstance(e, DecimalLit):
            return 0, 1
        if isinstance(e, Var):
            return state.get(e.name, self.widths.get(e.name, width_range(32)))
        if isinstance(e, Index):
            lo, hi = self.eval(e.index, state)
            length = e.length or 0
            positions = range(max(lo, 0), min(hi, length - 1) + 1)
            result: Optional[Range] = None
            for k in positions:
                r = self.eval(Var(element_name(e.name, k)), state)
                result = r if result is None else _hull(result, r)
            return result if result is not None else (0, 0)
        if isinstance(e, Unary):
            lo, hi = self.eval(e.operand, state)
            if e.op == "-":
                return -hi, -lo
            if lo == hi == 0:
                return 1, 1
            return (0, 1) if lo <= 0 <= hi else (0, 0)
        if isinstance(e, Binary):
            return self.binary(e.op, self.eval(e.left, state), self.eval(e.right, state))
        if isinstance(e, RandomCall):
            return self.eval(e.lo, state)[0], self.eval(e.hi, state)[1]
        if isinstance(e, RandomBit):
            return 0, 1
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    @staticmethod
    def binary(op: str, a: Range, b: Range) -> Range:
        if a[0] == a[1] and b[0] == b[1]:
            try:
                v = apply_binary(op, a[0], b[0])
                return v, v
            except ZeroDivisionError:
                return a
        if op == "+":
            return a[0] + b[0], a[1] + b[1]
        if op == "-":
            return a[0] - b[1], a[1] - b[0]
        if op == "*":
            corners = [x * y for x in a for y in b]
            return min(corners), max(corners)
        if op == "/":
            if b[0] > 0 or b[1] < 0:
                corners = [truncating_div(x, y) for x in a for y in b]
                return min(corners), max(corners)
            m = max(abs(a[0]), abs(a[1]))
            return -m, m
        if op == "%":
            m = max(abs(b[0]), abs(b[1])) - 1
            if a[0] >= 0:
                return 0, min(m, a[1])
            return -m, m
        if op == "xor":
            top = max(abs(a[0]), abs(a[1]), abs(b[0]), abs(b[1]))
            span = (1 << top.bit_length()) - 1
            if a[0] >= 0 and b[0] >= 0:
                return 0, span
            return -span - 1, span
        return 0, 1

    # Fixed point

    def transfer(self, node: int, state: AbstractState) -> AbstractState:
        data = self.cfg.node(node)
        if data.kind is not NodeKind.ASSIGN:
            return state
        out = dict(state)
        value = self.eval(data.expr, state)
        target = data.target
        if isinstance(target, Var):
            out[target.name] = _clamp(value, self.widths.get(target.name, width_range(32)))
            return out
        lo, hi = self.eval(target.index, state)
        positions = [k for k in range(max(lo, 0), min(hi, (target.length or 0) - 1) + 1)]
        for k in positions:
            name = element_name(target.name, k)
            clamped = _clamp(value, self.widths.get(name, width_range(32)))
            out[name] = clamped if len(positions) == 1 else _hull(out.get(name, clamped), clamped)
        return out

    def initial_state(self) -> AbstractState:
        state: AbstractState = {}
        for decl in self.program.declarations:
            init = decl.initializer
            if isinstance(init, Interval):
                r = (self.eval(init.lo, {})[0], self.eval(init.hi, {})[1])
            elif init is not None:
                r = self.eval(init, {})
            else:
                r = (0, 0)
            state[decl.name] = _clamp(r, self.widths[decl.name])
        return state

    def run(self) -> Dict[int, AbstractState]:
        graph = self.cfg.graph
        postorder = list(nx.dfs_postorder_nodes(graph, self.cfg.entry))
        rpo = {n: i for i, n in enumerate(reversed(postorder))}
        heads = {v for u, v in graph.edges if u in rpo and v in rpo and rpo[u] >= rpo[v]}

        in_states: Dict[int, AbstractState] = {self.cfg.entry: self.initial_state()}
        visits: Dict[int, int] = {}
        queue = [(rpo[self.cfg.entry], self.cfg.entry)]
        queued = {self.cfg.entry}
        while queue:
            _, node = heapq.heappop(queue)
            queued.discard(node)
            out = self.transfer(node, in_states[node])
            for succ in graph.successors(node):
                old = in_states.get(succ)
                new = out if old is None else {k: _hull(old[k], v) for k, v in out.items()}
                if old is not None and succ in heads:
                    visits[succ] = visits.get(succ, 0) + 1
                    if visits[succ] > WIDEN_AFTER:
                        new = self.widen(old, new)
                if new != old:
                    in_states[succ] = new
                    if succ not in queued:
                        heapq.heappush(queue, (rpo.get(succ, len(rpo)), succ))
                        queued.add(succ)
        return in_states

    def widen(self, old: AbstractState, new: AbstractState) -> AbstractState:
        widened = {}
        for name, (lo, hi) in new.items():
            bounds = self.widths.get(name, width_range(32))
            o_lo, o_hi = old.get(name, (lo, hi))
            widened[name] = (bounds[0] if lo < o_lo else lo, bounds[1] if hi > o_hi else hi)
        return widened

    def annotate(self, in_states: Mapping[int, AbstractState]) -> RangeAnnotation:
        observables = self.program.observables
        internals = self.program.internals
        secrets = self.program.secrets
        annotation = RangeAnnotation()
        for node, state in in_states.items():
            counts = {name: _count(r) for name, r in state.items()}
            annotation.per_node[node] = NodeRanges(
                intervals=dict(state),
                counts=counts,
                tot_obs=_product(counts[v] for v in observables),
                tot_int=_product(counts[v] for v in internals),
                tot_sec=_product(counts[v] for v in secrets),
            )
        return annotation


def _product(values: Iterable[int]) -> int:
    result = 1
    for v in values:
        result *= v
    return result


def estimate_ranges(cfg: Cfg) -> RangeAnnotation:
    """
    Estimate value counts for every variable on entry to every reachable node.

    Args:
        cfg: CFG of a preprocessed program

    Returns:
        RangeAnnotation with per-variable counts and the TOT_OBS / TOT_INT products
    """
    estimator = RangeEstimator(cfg)
    annotation = estimator.annotate(estimator.run())
    if cfg.exit in annotation:
        logger.debug(f"Ranges at exit: {annotation[cfg.exit].describe()}")
    return annotation
