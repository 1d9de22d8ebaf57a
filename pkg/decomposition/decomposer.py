#!/usr/bin/env python3
"""
Heuristic decomposition of a program into precisely and statistically analyzed components.

Candidate split points are the entry, the targets of conditional branches,
join nodes and the statements following a probabilistic assignment, as long
as neither they nor anything before them lies on a loop. Each candidate is
marked:

- Precise when its region has no probabilistic assignment
- SampleAbs when its observables do not depend on the secret
- Precise when its estimated internal state count #Z is at most its secret count #X
- Sample otherwise

Starting from the entry the walk stops at Precise and SampleAbs candidates
and descends through Sample candidates while the random fan-out of the
precise prefix stays within a budget. Sibling split points with the same
method that flow straight into a join marked the same way are merged at
the join. A ``simulate`` or ``simulate-abs`` statement is then inserted in
front of every statistical split point.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from config import COST_RULE_ALWAYS_SAMPLE, COST_RULE_Z_LE_X
from decomposition.cfg import Cfg, NodeKind, build_cfg
from decomposition.ranges import RangeAnnotation, RangeEstimator, estimate_ranges
from decomposition.taint import check_input_independent, post_dominators, written_names
from frontend.ast_nodes import (
    For,
    ForEach,
    If,
    Program,
    RandomBit,
    RandomCall,
    Simulate,
    SimulateAbs,
    Stmt,
    While,
    iter_stmts,
    renumber,
)

logger = logging.getLogger(__name__)

DEFAULT_PREFIX_BUDGET = 8


class Method(str, Enum):
    """How a component is analyzed."""

    PRECISE = "precise"
    SAMPLE = "sample"
    SAMPLE_ABS = "sample_abs"


@dataclass(frozen=True)
class PlannedComponent:
    """A split point of the program and the method chosen for what follows it."""

    component_id: int
    node: int
    line: int
    method: Method
    secret_count: int
    output_count: int
    internal_count: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.component_id,
            "line": self.line,
            "method": self.method.value,
            "secret_count": self.secret_count,
            "output_count": self.output_count,
            "internal_count": self.internal_count,
        }


@dataclass
class ComponentPlan:
    """
    Split points of a decomposition.

    Component weights are not known here: the precise engine computes them
    exactly while enumerating the prefix before the split points.
    """

    components: List[PlannedComponent] = field(default_factory=list)
    honored_explicit: bool = False
    probability_source: str = "precise prefix enumeration"

    @property
    def is_fully_precise(self) -> bool:
        return all(c.method is Method.PRECISE for c in self.components)

    def to_dict(self) -> Dict[str, object]:
        return {
            "components": [c.to_dict() for c in self.components],
            "honored_explicit": self.honored_explicit,
            "probability_source": self.probability_source,
        }


@dataclass
class Decomposition:
    plan: ComponentPlan
    program: Program
    cfg: Cfg
    ranges: RangeAnnotation


class Decomposer:
    """Marks candidates of one CFG and picks the split points."""

    def __init__(
        self,
        cfg: Cfg,
        ranges: RangeAnnotation,
        cost_rule: str = COST_RULE_Z_LE_X,
        prefix_budget: int = DEFAULT_PREFIX_BUDGET,
    ):
        self.cfg = cfg
        self.graph = cfg.graph
        self.ranges = ranges
        self.estimator = RangeEstimator(cfg)
        self.cost_rule = cost_rule
        self.prefix_budget = prefix_budget
        self.ipdom = post_dominators(cfg)
        self.cyclic = self._cyclic_nodes()
        self.candidates = self._candidates()
        self._methods: Dict[int, Method] = {}

    # Candidates

    def _cyclic_nodes(self) -> Set[int]:
        cyclic: Set[int] = set()
        for scc in nx.strongly_connected_components(self.graph):
            if len(scc) > 1:
                cyclic |= scc
            else:
                (n,) = scc
                if self.graph.has_edge(n, n):
                    cyclic.add(n)
        return cyclic

    def _candidates(self) -> Set[int]:
        found = {self.cfg.entry}
        for n in self.graph.nodes:
            data = self.cfg.node(n)
            if data.kind is NodeKind.BRANCH or data.is_random:
                found.update(self.graph.successors(n))
            if self.graph.in_degree(n) >= 2:
                found.add(n)
        found.discard(self.cfg.exit)
        return {
            n for n in found
            if n == self.cfg.entry
            or (n not in self.cyclic and not (nx.ancestors(self.graph, n) & self.cyclic))
        }

    # Marking

    def region(self, node: int) -> Set[int]:
        return nx.descendants(self.graph, node) | {node}

    def fanout(self, node: int) -> int:
        data = self.cfg.node(node)
        if isinstance(data.expr, RandomBit):
            return 2
        if isinstance(data.expr, RandomCall) and node in self.ranges:
            state = dict(self.ranges[node].intervals)
            lo = self.estimator.eval(data.expr.lo, state)[0]
            hi = self.estimator.eval(data.expr.hi, state)[1]
            return max(1, hi - lo + 1)
        return 1

    def prefix_fanout(self, node: int) -> int:
        total = 1
        for a in nx.ancestors(self.graph, node):
            if self.cfg.node(a).is_random:
                total *= self.fanout(a)
        return total

    def internal_count(self, region: Set[int]) -> int:
        """#Z: product of exit value counts of internal variables assigned in the region."""
        exit_ranges = self.ranges.per_node.get(self.cfg.exit)
        if exit_ranges is None:
            return 1 << 62
        internals = set(self.cfg.program.internals)
        assigned: Set[str] = set()
        for n in region:
            data = self.cfg.node(n)
            if data.kind is NodeKind.ASSIGN:
                assigned |= written_names(data.target) & internals
        count = 1
        for name in sorted(assigned):
            count *= exit_ranges.counts.get(name, 1)
        return count

    def method(self, node: int) -> Method:
        if node in self._methods:
            return self._methods[node]
        region = self.region(node)
        random_nodes = {n for n in region if self.cfg.node(n).is_random}
        if not random_nodes:
            result = Method.PRECISE
        elif check_input_independent(self.cfg, node, self.ipdom):
            result = Method.SAMPLE_ABS
        elif (
            self.cost_rule == COST_RULE_Z_LE_X
            and not (random_nodes & self.cyclic)
            and self.internal_count(region) <= self.secret_count(node)
        ):
            result = Method.PRECISE
        else:
            result = Method.SAMPLE
        self._methods[node] = result
        return result

    def secret_count(self, node: int) -> int:
        return self.ranges[node].tot_sec if node in self.ranges else 1

    # Selection

    def next_candidates(self, node: int) -> Tuple[Set[int], bool]:
        """First candidates on every path leaving ``node``, and whether that stretch is loop-free."""
        found: Set[int] = set()
        seen: Set[int] = set()
        loop_free = True
        frontier = list(self.graph.successors(node))
        while frontier:
            n = frontier.pop()
            if n in seen:
                continue
            seen.add(n)
            if n in self.candidates and n != node:
                found.add(n)
                continue
            if n in self.cyclic:
                loop_free = False
            frontier.extend(self.graph.successors(n))
        return found, loop_free

    def choose(self, node: int, chosen: Dict[int, Method]) -> None:
        m = self.method(node)
        if m is Method.SAMPLE:
            following, loop_free = self.next_candidates(node)
            if (
                following
                and loop_free
                and node not in self.cyclic
                and all(self.prefix_fanout(n) <= self.prefix_budget for n in following)
            ):
                for n in sorted(following):
                    if n not in chosen:
                        self.choose(n, chosen)
                return
        chosen[node] = m

    def straight_line_target(self, node: int) -> Optional[int]:
        """The first node with several predecessors reached from ``node`` without branching."""
        n = node
        seen: Set[int] = set()
        while n not in seen:
            seen.add(n)
            data = self.cfg.node(n)
            if data.kind in (NodeKind.BRANCH, NodeKind.END, NodeKind.RETURN):
                return None
            succ = self.cfg.next(n)
            if self.graph.in_degree(succ) >= 2:
                return succ
            n = succ
        return None

    def hoist_joins(self, chosen: Dict[int, Method]) -> Dict[int, Method]:
        changed = True
        while changed:
            changed = False
            by_join: Dict[int, List[int]] = {}
            for node, m in chosen.items():
                if m is Method.PRECISE:
                    continue
                join = self.straight_line_target(node)
                if join is not None and join in self.candidates:
                    by_join.setdefault(join, []).append(node)
            for join, members in sorted(by_join.items()):
                methods = {chosen[n] for n in members}
                if (
                    len(members) >= 2
                    and len(methods) == 1
                    and self.method(join) in methods
                    and len(members) == self.graph.in_degree(join)
                ):
                    for n in members:
                        del chosen[n]
                    chosen[join] = self.method(join)
                    logger.debug(f"Merged {len(members)} split points at node {join}")
                    changed = True
                    break
        return chosen

    def plan(self) -> Dict[int, Method]:
        chosen: Dict[int, Method] = {}
        self.choose(self.cfg.entry, chosen)
        return self.hoist_joins(chosen)

    def describe(self, chosen: Dict[int, Method]) -> ComponentPlan:
        exit_ranges = self.ranges.per_node.get(self.cfg.exit)
        outputs = exit_ranges.tot_obs if exit_ranges is not None else 1
        components = []
        for i, node in enumerate(sorted(chosen)):
            components.append(PlannedComponent(
                component_id=i,
                node=node,
                line=self.cfg.node(node).line,
                method=chosen[node],
                secret_count=self.secret_count(node),
                output_count=outputs,
                internal_count=self.internal_count(self.region(node)),
            ))
        return ComponentPlan(components=components)


# AST rewriting

def has_explicit_simulate(program: Program) -> bool:
    return any(isinstance(s, (Simulate, SimulateAbs)) for s in iter_stmts(program.body))


def _marker(method: Method, line: int) -> Stmt:
    return Simulate(line=line) if method is Method.SAMPLE else SimulateAbs(line=line)


def insert_simulations(program: Program, points: Iterable[Tuple[int, str, Method, int]]) -> Program:
    """
    Insert simulate statements at (statement id, part, method, line) points.

    ``part`` is "" to insert before the statement, "elif:K" to split an
    if-chain in front of its K-th elif test, or "arm:NAME" to fill an empty arm.
    """
    at: Dict[Tuple[int, str], Stmt] = {(sid, part): _marker(m, line) for sid, part, m, line in points}

    def block(stmts: Tuple[Stmt, ...]) -> Tuple[Stmt, ...]:
        out: List[Stmt] = []
        for s in stmts:
            if (s.sid, "") in at:
                out.append(at[(s.sid, "")])
            out.append(one(s))
        return tuple(out)

    def arm(stmts: Tuple[Stmt, ...], sid: int, name: str) -> Tuple[Stmt, ...]:
        if not stmts and (sid, f"arm:{name}") in at:
            return (at[(sid, f"arm:{name}")],)
        return block(stmts)

    def one(s: Stmt) -> Stmt:
        if isinstance(s, If):
            then = arm(s.then, s.sid, "then")
            elifs = [(c, arm(b, s.sid, f"elif:{k}")) for k, (c, b) in enumerate(s.elifs, start=1)]
            orelse = arm(s.orelse, s.sid, "else")
            for k in range(len(elifs), 0, -1):
                if (s.sid, f"elif:{k}") in at:
                    cond, body = elifs[k - 1]
                    tail = If(cond, body, tuple(elifs[k:]), orelse, line=s.line)
                    orelse = (at[(s.sid, f"elif:{k}")], tail)
                    elifs = elifs[:k - 1]
            return replace(s, then=then, elifs=tuple(elifs), orelse=orelse)
        if isinstance(s, While):
            return replace(s, body=arm(s.body, s.sid, "body"))
        if isinstance(s, (For, ForEach)):
            return replace(s, body=block(s.body))
        return s

    return renumber(replace(program, body=block(program.body)))


def strip_simulations(program: Program) -> Program:
    def block(stmts: Tuple[Stmt, ...]) -> Tuple[Stmt, ...]:
        return tuple(one(s) for s in stmts if not isinstance(s, (Simulate, SimulateAbs)))

    def one(s: Stmt) -> Stmt:
        if isinstance(s, If):
            return replace(
                s,
                then=block(s.then),
                elifs=tuple((c, block(b)) for c, b in s.elifs),
                orelse=block(s.orelse),
            )
        if isinstance(s, (While, For, ForEach)):
            return replace(s, body=block(s.body))
        return s

    return renumber(replace(program, body=block(program.body)))


def force_method(program: Program, method: Method) -> Program:
    """
    Program analyzed as a single component with ``method``.

    Simulate statements already in the source are dropped first; for
    Precise nothing is inserted.
    """
    program = strip_simulations(program)
    if method is Method.PRECISE or not program.body:
        return program
    return renumber(replace(program, body=(_marker(method, program.body[0].line),) + program.body))


def explicit_plan(cfg: Cfg, ranges: RangeAnnotation) -> ComponentPlan:
    """Plan describing the simulate statements already present in the source."""
    decomposer = Decomposer(cfg, ranges)
    chosen = {
        n: (Method.SAMPLE if cfg.node(n).kind is NodeKind.SIMULATE else Method.SAMPLE_ABS)
        for n in cfg.graph.nodes
        if cfg.node(n).is_simulate
    }
    plan = decomposer.describe(chosen)
    plan.honored_explicit = True
    return plan


def decompose(
    cfg: Cfg,
    ranges: RangeAnnotation,
    cost_rule: str = COST_RULE_Z_LE_X,
    prefix_budget: int = DEFAULT_PREFIX_BUDGET,
) -> Decomposition:
    """
    Split a program into components and annotate it with simulate statements.

    Args:
        cfg: CFG of the preprocessed program
        ranges: Range annotation of ``cfg``
        cost_rule: "z-le-x" or "always-sample"
        prefix_budget: Largest random fan-out allowed in the precise prefix

    Returns:
        Decomposition with the plan, the annotated program and its CFG
    """
    program = cfg.program
    if has_explicit_simulate(program):
        logger.info("Source contains simulate statements; decomposition skipped")
        return Decomposition(explicit_plan(cfg, ranges), program, cfg, ranges)

    if cost_rule not in (COST_RULE_Z_LE_X, COST_RULE_ALWAYS_SAMPLE):
        raise ValueError(f"unknown cost rule {cost_rule!r}")
    decomposer = Decomposer(cfg, ranges, cost_rule, prefix_budget)
    chosen = decomposer.plan()
    plan = decomposer.describe(chosen)

    points = []
    for node, m in chosen.items():
        if m is Method.PRECISE:
            continue
        data = cfg.node(node)
        points.append((data.sid, data.part, m, data.line))
    annotated = insert_simulations(program, points) if points else program
    annotated_cfg = build_cfg(annotated) if points else cfg
    for c in plan.components:
        logger.info(f"Component {c.component_id} at line {c.line}: {c.method.value}")
    return Decomposition(plan, annotated, annotated_cfg, estimate_ranges(annotated_cfg))
