#!/usr/bin/env python3
"""
Control flow graph of a preprocessed program.

Every simple statement becomes one node; ``if`` and ``while`` become branch
nodes with ``True``/``False`` labelled out-edges, which is the if-goto form
of the program. ``return`` links to the single End node, as does the end of
the body. Straight-line nodes link directly to the node that follows their
block, so all arms of a conditional meet at its join node.

The graph is a networkx DiGraph whose node ids are integers; the CfgNode
describing a node is stored under the ``data`` attribute.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from frontend.ast_nodes import (
    Assign,
    Expr,
    For,
    ForEach,
    If,
    LValue,
    Program,
    Return,
    Simulate,
    SimulateAbs,
    Stmt,
    While,
    is_random,
)
from frontend.printer import format_expr

logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    ASSIGN = "assign"
    BRANCH = "branch"
    RETURN = "return"
    SIMULATE = "simulate"
    SIMULATE_ABS = "simulate_abs"
    NOP = "nop"
    END = "end"


@dataclass(frozen=True)
class CfgNode:
    """Payload of one CFG node."""

    kind: NodeKind
    sid: int = 0
    line: int = 0
    target: Optional[LValue] = None
    expr: Optional[Expr] = None
    # Which part of a compound statement the node stands for: "" for the
    # statement itself, "elif:K" for the K-th elif test, "arm:NAME" for an empty arm
    part: str = ""

    @property
    def is_random(self) -> bool:
        return self.kind is NodeKind.ASSIGN and self.expr is not None and is_random(self.expr)

    @property
    def is_simulate(self) -> bool:
        return self.kind in (NodeKind.SIMULATE, NodeKind.SIMULATE_ABS)

    def label(self) -> str:
        if self.kind is NodeKind.ASSIGN:
            return f"{format_expr(self.target)} := {format_expr(self.expr)}"
        if self.kind is NodeKind.BRANCH:
            return f"if {format_expr(self.expr)}"
        if self.kind is NodeKind.SIMULATE_ABS:
            return "simulate-abs"
        return self.kind.value


class Cfg:
    """Control flow graph with one entry and one exit (the End node)."""

    def __init__(self, graph: nx.DiGraph, entry: int, exit_node: int, program: Program):
        self.graph = graph
        self.entry = entry
        self.exit = exit_node
        self.program = program

    def node(self, n: int) -> CfgNode:
        return self.graph.nodes[n]["data"]

    def successors(self, n: int) -> List[int]:
        return list(self.graph.successors(n))

    def branch_targets(self, n: int) -> Tuple[int, int]:
        """(true successor, false successor) of a branch node."""
        targets: Dict[bool, int] = {}
        for _, succ, label in self.graph.out_edges(n, data="label"):
            targets[bool(label)] = succ
        return targets[True], targets[False]

    def next(self, n: int) -> int:
        """Unique successor of a non-branch, non-end node."""
        (succ,) = self.graph.successors(n)
        return succ

    def nodes(self) -> Iterator[int]:
        return iter(self.graph.nodes)

    def by_sid(self, sid: int) -> Optional[int]:
        for n, data in self.graph.nodes(data="data"):
            if data.sid == sid and not data.part:
                return n
        return None

    def __len__(self) -> int:
        return self.graph.number_of_nodes()


class _Builder:
    def __init__(self) -> None:
        self.graph = nx.DiGraph()
        self.counter = 0

    def add(self, node: CfgNode) -> int:
        n = self.counter
        self.counter += 1
        self.graph.add_node(n, data=node)
        return n

    def edge(self, a: int, b: int, label: Optional[bool] = None) -> None:
        self.graph.add_edge(a, b, label=label)

    def block(self, stmts: Tuple[Stmt, ...], succ: int, end: int) -> int:
        """Build ``stmts`` backwards so each statement knows its successor; returns the entry."""
        for stmt in reversed(stmts):
            succ = self.stmt(stmt, succ, end)
        return succ

    def arm(
        self, stmts: Tuple[Stmt, ...], succ: int, end: int, sid: int, line: int, name: str
    ) -> int:
        if stmts:
            return self.block(stmts, succ, end)
        nop = self.add(CfgNode(NodeKind.NOP, sid, line, part=f"arm:{name}"))
        self.edge(nop, succ)
        return nop

    def stmt(self, s: Stmt, succ: int, end: int) -> int:
        if isinstance(s, Assign):
            n = self.add(CfgNode(NodeKind.ASSIGN, s.sid, s.line, s.target, s.value))
            self.edge(n, succ)
            return n
        if isinstance(s, If):
            false_entry = self.arm(s.orelse, succ, end, s.sid, s.line, "else")
            for k in range(len(s.elifs), 0, -1):
                cond, body = s.elifs[k - 1]
                branch = self.add(CfgNode(NodeKind.BRANCH, s.sid, s.line, expr=cond, part=f"elif:{k}"))
                self.edge(branch, self.arm(body, succ, end, s.sid, s.line, f"elif:{k}"), True)
                self.edge(branch, false_entry, False)
                false_entry = branch
            branch = self.add(CfgNode(NodeKind.BRANCH, s.sid, s.line, expr=s.cond))
            self.edge(branch, self.arm(s.then, succ, end, s.sid, s.line, "then"), True)
            self.edge(branch, false_entry, False)
            return branch
        if isinstance(s, While):
            head = self.add(CfgNode(NodeKind.BRANCH, s.sid, s.line, expr=s.cond))
            self.edge(head, self.arm(s.body, head, end, s.sid, s.line, "body"), True)
            self.edge(head, succ, False)
            return head
        if isinstance(s, Return):
            n = self.add(CfgNode(NodeKind.RETURN, s.sid, s.line))
            self.edge(n, end)
            return n
        if isinstance(s, (Simulate, SimulateAbs)):
            kind = NodeKind.SIMULATE if isinstance(s, Simulate) else NodeKind.SIMULATE_ABS
            n = self.add(CfgNode(kind, s.sid, s.line))
            self.edge(n, succ)
            return n
        if isinstance(s, (For, ForEach)):
            raise ValueError(f"line {s.line}: loops must be preprocessed before building a CFG")
        raise TypeError(f"unknown statement {type(s).__name__}")


def build_cfg(program: Program) -> Cfg:
    """
    Build the control flow graph of a preprocessed program.

    Nodes unreachable from the entry (code after ``return``) are dropped.
    """
    builder = _Builder()
    end = builder.add(CfgNode(NodeKind.END))
    entry = builder.block(program.body, end, end)
    # Number nodes in depth-first order from the entry, dropping unreachable ones
    order = list(nx.dfs_preorder_nodes(builder.graph, entry))
    if end not in order:
        order.append(end)
    mapping = {old: new for new, old in enumerate(order)}
    graph = nx.relabel_nodes(builder.graph.subgraph(order), mapping, copy=True)
    logger.debug(f"CFG: {graph.number_of_nodes()} nodes, {graph.number_of_edges()} edges")
    return Cfg(graph, mapping[entry], mapping[end], program)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(cfg: Cfg, annotations: Optional[Dict[int, str]] = None) -> str:
    """DOT text of a CFG; simulate nodes are drawn in red."""
    result = "digraph CFG {\n"
    result += "  node [shape=box];\n"
    for n in sorted(cfg.graph.nodes):
        node = cfg.node(n)
        label = _dot_escape(node.label())
        if node.line:
            label = f"{node.line}: {label}"
        if annotations and n in annotations:
            label += "\\n" + _dot_escape(annotations[n])
        style = ' color=red fontcolor=red' if node.is_simulate else ''
        shape = ' shape=diamond' if node.kind is NodeKind.BRANCH else ''
        result += f'  n{n} [label="{label}"{shape}{style}];\n'
    for a, b, label in sorted(cfg.graph.edges(data="label"), key=lambda e: (e[0], e[1])):
        edge_label = "" if label is None else f' [label="{"T" if label else "F"}"]'
        result += f"  n{a} -> n{b}{edge_label};\n"
    result += "}\n"
    return result
