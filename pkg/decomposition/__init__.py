#!/usr/bin/env python3
"""
Decomposition module for the leakage analyzer.
Builds the CFG, estimates value ranges and picks the component split points.
"""

from .cfg import Cfg, CfgNode, NodeKind, build_cfg, to_dot
from .decomposer import (
    ComponentPlan,
    Decomposition,
    Method,
    PlannedComponent,
    decompose,
    force_method,
    has_explicit_simulate,
    insert_simulations,
    strip_simulations,
)
from .ranges import NodeRanges, RangeAnnotation, estimate_ranges
from .taint import check_input_independent, tainted_variables

__all__ = [
    'Cfg',
    'CfgNode',
    'ComponentPlan',
    'Decomposition',
    'Method',
    'NodeKind',
    'NodeRanges',
    'PlannedComponent',
    'RangeAnnotation',
    'build_cfg',
    'check_input_independent',
    'decompose',
    'estimate_ranges',
    'force_method',
    'has_explicit_simulate',
    'insert_simulations',
    'strip_simulations',
    'tainted_variables',
    'to_dot',
]
