#!/usr/bin/env python3
"""
Syntactic secret-dependence check for program regions.

Secret variables are taint sources. Taint flows through assignments (data
dependence) and into every assignment controlled by a branch whose
condition is tainted (control dependence). The control region of a branch
spans the nodes reachable from it before its immediate post-dominator.
The analysis is flow-insensitive over the region, so it only errs towards
reporting a dependence.
"""

import logging
from typing import Dict, FrozenSet, Optional, Set

import networkx as nx

from decomposition.cfg import Cfg, NodeKind
from frontend.ast_nodes import Index, LValue, free_vars

logger = logging.getLogger(__name__)


def post_dominators(cfg: Cfg) -> Dict[int, int]:
    """Immediate post-dominator of every node that can reach the exit."""
    return nx.immediate_dominators(cfg.graph.reverse(copy=False), cfg.exit)


def written_names(target: LValue) -> Set[str]:
    """Variables an assignment to ``target`` may write."""
    if isinstance(target, Index):
        return {name for name in free_vars(target) if name not in free_vars(target.index)}
    return {target.name}


def region(cfg: Cfg, entry: int) -> Set[int]:
    """Nodes reachable from ``entry``, itself included."""
    return nx.descendants(cfg.graph, entry) | {entry}


def control_region(cfg: Cfg, branch: int, ipdom: Dict[int, int]) -> Set[int]:
    stop: Optional[int] = ipdom.get(branch)
    if stop == branch:
        stop = None
    seen: Set[int] = set()
    frontier = [s for s in cfg.graph.successors(branch) if s != stop]
    while frontier:
        n = frontier.pop()
        if n in seen:
            continue
        seen.add(n)
        frontier.extend(s for s in cfg.graph.successors(n) if s != stop and s not in seen)
    return seen


def tainted_variables(
    cfg: Cfg, entry: int, ipdom: Optional[Dict[int, int]] = None
) -> FrozenSet[str]:
    """
    Variables that may depend on a secret within the region starting at ``entry``.

    Args:
        cfg: Program CFG
        entry: First node of the region
        ipdom: Precomputed post-dominators (computed when omitted)

    Returns:
        Tainted variable names, secrets included
    """
    ipdom = post_dominators(cfg) if ipdom is None else ipdom
    nodes = region(cfg, entry)
    tainted: Set[str] = set(cfg.program.secrets)
    controlled: Set[int] = set()
    expanded: Set[int] = set()

    changed = True
    while changed:
        changed = False
        for n in nodes:
            data = cfg.node(n)
            if data.kind is NodeKind.BRANCH and n not in expanded and free_vars(data.expr) & tainted:
                expanded.add(n)
                controlled |= control_region(cfg, n, ipdom) & nodes
                changed = True
            if data.kind is not NodeKind.ASSIGN:
                continue
            reads = set(free_vars(data.expr))
            target = data.target
            if isinstance(target, Index):
                reads |= free_vars(target.index)
            written = written_names(target)
            if (reads & tainted or n in controlled) and not written <= tainted:
                tainted |= written
                changed = True
    return frozenset(tainted)


def check_input_independent(cfg: Cfg, entry: int, ipdom: Optional[Dict[int, int]] = None) -> bool:
    """
    Whether no observable assignment in the region may depend on a secret.

    Args:
        cfg: Program CFG
        entry: First node of the component
        ipdom: Precomputed post-dominators

    Returns:
        True when the component's outputs are independent of its secret input
    """
    tainted = tainted_variables(cfg, entry, ipdom)
    independent = not (tainted & set(cfg.program.observables))
    logger.debug(f"Region at node {entry}: input independent = {independent}")
    return independent
